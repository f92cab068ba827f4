#include "gre/instrumentation.hpp"

namespace gre::instrumentation {

namespace {
thread_local bool enabled = false;
thread_local std::vector<std::size_t> log;
}  // namespace

void enable_factorization_log(bool on) { enabled = on; }
void clear_factorization_log() { log.clear(); }
const std::vector<std::size_t>& factorization_log() { return log; }
void record_factorization(std::size_t n) {
  if (enabled) log.push_back(n);
}

}  // namespace gre::instrumentation
