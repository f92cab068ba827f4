#include "gre/simulator.hpp"

#include "gre/error.hpp"

#include <json.hpp>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <regex>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace gre {

namespace {

const std::regex kPlaceholder(R"(\{x([0-9]+)\})");

std::map<std::size_t, int> placeholder_counts(const std::string& t) {
  std::map<std::size_t, int> counts;
  for (std::sregex_iterator it(t.begin(), t.end(), kPlaceholder), end; it != end; ++it) {
    ++counts[std::stoul((*it)[1].str())];
  }
  return counts;
}

std::string last_nonempty_line(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
  }
  return last;
}

nlohmann::json output_json(const std::string& out) {
  try {
    return nlohmann::json::parse(out);
  } catch (const nlohmann::json::exception&) {
  }
  try {
    return nlohmann::json::parse(last_nonempty_line(out));
  } catch (const nlohmann::json::exception&) {
    throw SimulatorError("simulator output is not JSON", out);
  }
}

double json_number(const nlohmann::json& root, const std::string& path, const std::string& out) {
  const nlohmann::json* node = &root;
  std::stringstream ss(path);
  for (std::string key; std::getline(ss, key, '.');) {
    if (!node->is_object() || !node->contains(key)) {
      throw SimulatorError("simulator output has no field '" + path + "'", out);
    }
    node = &node->at(key);
  }
  if (!node->is_number()) throw SimulatorError("simulator field '" + path + "' is not a number", out);
  const double v = node->get<double>();
  if (!std::isfinite(v)) throw SimulatorError("simulator field '" + path + "' is not finite", out);
  return v;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

struct ProcessOutcome {
  int status = 0;
  bool timed_out = false;
  std::string output;
  double seconds = 0.0;
};

ProcessOutcome spawn(const std::vector<std::string>& args, const std::string& run_id, double timeout) {
  using clock = std::chrono::steady_clock;
  if (args.empty()) throw SimulatorError("simulator command is empty", "");

  // Everything the child needs is prepared before fork.
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const std::string run_var = std::string(kRunIdVariable) + "=" + run_id;
  std::vector<char*> envp;
  const std::size_t prefix = std::strlen(kRunIdVariable) + 1;
  for (char** e = environ; *e; ++e) {
    if (std::strncmp(*e, run_var.c_str(), prefix) != 0) envp.push_back(*e);
  }
  envp.push_back(const_cast<char*>(run_var.c_str()));
  envp.push_back(nullptr);

  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw SimulatorError(std::string("pipe: ") + std::strerror(errno), "");
  const auto start = clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw SimulatorError(std::string("fork: ") + std::strerror(errno), "");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::execvpe(argv[0], argv.data(), envp.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);

  ProcessOutcome res;
  const auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(timeout));
  char buf[4096];
  bool open = true;
  while (open) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      res.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n > 0) {
      res.output.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      open = false;
    }
  }
  ::close(fds[0]);

  int status = 0;
  while (!res.timed_out) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) break;
    if (clock::now() >= deadline) {
      res.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (res.timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
  }
  res.seconds = std::chrono::duration<double>(clock::now() - start).count();
  if (WIFEXITED(status)) {
    res.status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    res.status = 128 + WTERMSIG(status);
  }
  return res;
}

}  // namespace

std::size_t SimulatorSpec::dim() const {
  const auto counts = placeholder_counts(command_template);
  return counts.empty() ? 0 : counts.rbegin()->first;
}

void SimulatorSpec::validate() const {
  const auto counts = placeholder_counts(command_template);
  if (counts.empty()) throw InvalidArgument("simulator command has no {x1} placeholder");
  const std::size_t d = counts.rbegin()->first;
  for (std::size_t i = 1; i <= d; ++i) {
    const auto it = counts.find(i);
    if (it == counts.end()) throw InvalidArgument("simulator command lacks placeholder {x" + std::to_string(i) + "}");
    if (it->second != 1) {
      throw InvalidArgument("simulator command uses {x" + std::to_string(i) + "} more than once");
    }
  }
  if (counts.count(0)) throw InvalidArgument("simulator placeholders are numbered from {x1}");
  if (!(timeout > 0.0)) throw InvalidArgument("simulator timeout must be positive");
  if (parse == ParseMode::JsonValue && value_path.empty()) throw InvalidArgument("JSON value parsing needs a field path");
  if (cost_source == CostSource::Reported && cost_path.empty()) {
    throw InvalidArgument("reported cost needs a field path");
  }
  if (cost_source == CostSource::Predicted) {
    const Expression e(cost_expression);
    if (e.max_variable() > d) {
      throw DimensionError("cost expression refers to x" + std::to_string(e.max_variable()) + " beyond the " +
                           std::to_string(d) + " fidelity parameters");
    }
  }
}

double SimulatorSpec::predicted_cost(std::span<const double> x) const {
  if (cost_source != CostSource::Predicted) throw InvalidArgument("simulator has no cost expression");
  const double c = Expression(cost_expression)(x);
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("cost expression must be positive and finite");
  return c;
}

std::string render_command(const std::string& t, std::span<const double> x) {
  std::string out;
  std::size_t last = 0;
  for (std::sregex_iterator it(t.begin(), t.end(), kPlaceholder), end; it != end; ++it) {
    const std::size_t i = std::stoul((*it)[1].str());
    if (i == 0 || i > x.size()) {
      throw DimensionError("placeholder {x" + std::to_string(i) + "} but the point has " + std::to_string(x.size()) +
                           " components");
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x[i - 1]);
    out.append(t, last, static_cast<std::size_t>(it->position()) - last);
    out += buf;
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  out.append(t, last, std::string::npos);
  return out;
}

double parse_value(const SimulatorSpec& spec, const std::string& output) {
  if (spec.parse == ParseMode::JsonValue) return json_number(output_json(output), spec.value_path, output);
  const std::string line = last_nonempty_line(output);
  const char* begin = line.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || (end && *end) || !std::isfinite(v)) {
    throw SimulatorError("last output line is not a number: '" + line + "'", output);
  }
  return v;
}

double parse_reported_cost(const SimulatorSpec& spec, const std::string& output) {
  return json_number(output_json(output), spec.cost_path, output);
}

SimResult run_simulator(const SimulatorSpec& spec, std::span<const double> x, const std::string& run_id) {
  spec.validate();
  if (x.size() != spec.dim()) {
    throw DimensionError("simulator expects " + std::to_string(spec.dim()) + " fidelity parameters, got " +
                         std::to_string(x.size()));
  }
  for (double v : x) {
    if (!(v > 0.0)) throw InvalidArgument("simulator fidelity parameters must be positive");
  }
  const std::string cmd = render_command(spec.command_template, x);
  const std::vector<std::string> args = spec.shell ? std::vector<std::string>{"/bin/sh", "-c", cmd} : split_words(cmd);

  SimResult res;
  ProcessOutcome p;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    res.attempts = attempt;
    p = spawn(args, run_id, spec.timeout);
    if (p.timed_out) {
      throw SimulatorError("simulator timed out after " + std::to_string(spec.timeout) + " s: " + cmd, p.output);
    }
    if (p.status == 0) break;
  }
  res.exit_status = p.status;
  res.output = p.output;
  res.wall_time = p.seconds;
  if (p.status != 0) {
    throw SimulatorError("simulator exited with status " + std::to_string(p.status) + " twice: " + cmd, p.output);
  }
  res.value = parse_value(spec, p.output);
  switch (spec.cost_source) {
    case CostSource::Measured: res.cost = p.seconds; break;
    case CostSource::Reported: res.cost = parse_reported_cost(spec, p.output); break;
    case CostSource::Predicted: res.cost = spec.predicted_cost(x); break;
  }
  return res;
}

ProcessSimulator::ProcessSimulator(SimulatorSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

SimResult ProcessSimulator::run(std::span<const double> x, const std::string& run_id) {
  count();
  return run_simulator(spec_, x, run_id);
}

std::optional<double> ProcessSimulator::predict_cost(std::span<const double> x) const {
  if (spec_.cost_source != CostSource::Predicted) return std::nullopt;
  return spec_.predicted_cost(x);
}

FunctionSimulator::FunctionSimulator(Function f, Function cost) : f_(std::move(f)), cost_(std::move(cost)) {}

SimResult FunctionSimulator::run(std::span<const double> x, const std::string&) {
  count();
  SimResult r;
  r.value = f_(x);
  r.cost = cost_ ? cost_(x) : 0.0;
  r.wall_time = 0.0;
  return r;
}

std::optional<double> FunctionSimulator::predict_cost(std::span<const double> x) const {
  if (!cost_) return std::nullopt;
  return cost_(x);
}

}  // namespace gre
