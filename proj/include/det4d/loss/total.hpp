#pragma once

#include <span>

#include "det4d/loss/params.hpp"

namespace det4d {

/// Unweighted sum of loss parts sharing one parameter layout: values add and
/// gradients add componentwise.
inline LossValue total_loss(std::span<const LossValue> parts) {
  LossValue out;
  for (const auto& part : parts) {
    out.value += part.value;
    if (out.gradient.empty()) {
      out.gradient = part.gradient;
    } else {
      if (part.gradient.size() != out.gradient.size())
        throw DimMismatch("total_loss: parts declare different parameter counts");
      for (std::size_t i = 0; i < out.gradient.size(); ++i)
        out.gradient[i] += part.gradient[i];
    }
  }
  return out;
}

}  // namespace det4d
