#include "qreduct/trace.hpp"

namespace qreduct {

StateVector EvolutionTrace::state_at(std::size_t i) const {
  if (i >= coeff.size()) throw Error("trace: step index out of range");
  return StateVector(reg, basis * coeff[i]);
}

}  // namespace qreduct
