#pragma once

#include <array>
#include <optional>
#include <span>

namespace sedm::learn {

/// counts[observed][predicted] for labels 0 and 1.
using Confusion = std::array<std::array<long, 2>, 2>;

Confusion confusion(std::span<const int> predicted, std::span<const int> observed);

double accuracy(const Confusion& c);
double accuracy(std::span<const int> predicted, std::span<const int> observed);

/// Cohen's kappa; empty when chance agreement is 1 (a single class everywhere).
std::optional<double> kappa(const Confusion& c);
std::optional<double> kappa(std::span<const int> predicted, std::span<const int> observed);

double mae(std::span<const double> predicted, std::span<const double> observed);
double rmse(std::span<const double> predicted, std::span<const double> observed);

/// 1 - SS_res / SS_tot; empty when the observations are constant.
std::optional<double> r_squared(std::span<const double> predicted, std::span<const double> observed);

}  // namespace sedm::learn
