#pragma once

#include <cstddef>

namespace fockspec {

/**
 * @brief Index-ordered pairwise summation of term(0) + ... + term(n-1).
 *
 * The split points depend only on n, so the result is reproducible bit for
 * bit regardless of how the caller computes the terms.
 */
template <class Term>
double pairwise_sum(std::size_t n, Term&& term, std::size_t begin = 0) {
  constexpr std::size_t block = 64;
  if (n <= block) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(begin + i);
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(half, term, begin) + pairwise_sum(n - half, term, begin + half);
}

}  // namespace fockspec
