#pragma once

#include <iosfwd>
#include <string>

#include "ikpca/ikpca.hpp"

namespace ikpca {

// Versioned plain-text state snapshot.  Layout (version 1):
//   ikpca-state 1
//   mode zero-mean|centered
//   kernel rbf <sigma>
//   m <points> dim <features>
//   kernel_sum <S>
//   update_count <n> bootstrap <m0> next_stream <i>
//   exclusion_threshold <rel>
//   values    <m numbers>
//   vectors   followed by m lines of m numbers, row-major
//   row_sums  <m numbers>
//   points    followed by m lines of dim numbers
//   excluded <count> followed by one "<stream index> <reason>" line each
// All numbers use 17 significant digits, so a load reproduces every double
// bit for bit.
void save_state(const IkpcaState<double>& state, std::ostream& out);
void save_state(const IkpcaState<double>& state, const std::string& path);

IkpcaState<double> load_state(std::istream& in);
IkpcaState<double> load_state(const std::string& path);

}  // namespace ikpca
