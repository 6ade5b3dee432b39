// Private to the kernel-trusted translation units (kernel.cpp and the
// instance calculus): the only way to mint Theorem values.

#ifndef DYNTH_SRC_THEOREM_MAKER_HPP_
#define DYNTH_SRC_THEOREM_MAKER_HPP_

#include "dynth/kernel.hpp"

namespace dynth {

struct ThmMaker {
  static Theorem make(TheoryId th, std::vector<Formula> gamma, Formula concl) {
    return Theorem(th, std::move(gamma), std::move(concl));
  }
};

}  // namespace dynth

#endif  // DYNTH_SRC_THEOREM_MAKER_HPP_
