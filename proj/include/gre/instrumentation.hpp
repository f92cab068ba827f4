#pragma once

#include <cstddef>
#include <vector>

namespace gre::instrumentation {

/// Records the dimension of every Cholesky factorisation performed on the
/// calling thread while enabled. Used by tests to check that structured
/// algorithms never factor matrices larger than intended.
void enable_factorization_log(bool on);
void clear_factorization_log();
const std::vector<std::size_t>& factorization_log();
void record_factorization(std::size_t n);

}  // namespace gre::instrumentation
