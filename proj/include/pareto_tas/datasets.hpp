#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pareto_tas/model.hpp"

namespace pareto_tas::datasets {

struct ReferenceWeight {
  std::string_view label;
  double weight;
};

// Third-dose immunogenicity study: 20 arms (prime / booster), objectives
// anti-spike IgG, NT50 and cellular response with pooled variances.
inline BanditInstance covid() {
  BanditInstance inst;
  inst.means = Matrix{
      {9.5, 6.86, 4.56},   {9.29, 6.64, 4.04},  {9.05, 6.41, 3.56}, {10.21, 7.49, 4.43},
      {10.05, 7.2, 4.36},  {8.34, 5.67, 3.51},  {8.22, 5.46, 3.64}, {9.75, 7.21, 4.71},
      {10.43, 7.61, 4.72}, {8.94, 6.19, 3.84},  {7.81, 5.26, 3.97}, {8.85, 6.59, 4.73},
      {8.44, 6.15, 4.59},  {9.93, 7.39, 4.75},  {8.71, 7.2, 4.91},  {7.51, 5.31, 3.96},
      {7.27, 4.99, 4.02},  {8.62, 6.33, 4.66},  {10.35, 7.77, 5.0}, {8.29, 5.92, 3.87},
  };
  inst.variances = {0.70, 0.83, 1.54};
  inst.labels = {
      "BNT/ChAd",  "BNT/NVX",   "BNT/NVX Half",  "BNT/BNT",  "BNT/BNT Half",
      "BNT/VLA",   "BNT/VLA Half", "BNT/Ad26",   "BNT/m1273", "BNT/CVn",
      "ChAd/ChAd", "ChAd/NVX",  "ChAd/NVX Half", "ChAd/BNT", "ChAd/BNT Half",
      "ChAd/VLA",  "ChAd/VLA Half", "ChAd/Ad26", "ChAd/m1273", "ChAd/CVn",
  };
  return inst;
}

// Published optimal allocation for covid(), in arm order.
inline std::vector<double> covid_reference_weights() {
  return {0.0077, 0.0016, 0.0007, 0.023,  0.0048, 0.00066, 0.00079, 0.018, 0.14, 0.0011,
          0.0014, 0.021,  0.0089, 0.025,  0.35,   0.0014,  0.0015,  0.013, 0.38, 0.0012};
}

inline constexpr double kCovidTStar = 2103.78;

inline BanditInstance by_name(std::string_view name) {
  if (name == "covid") return covid();
  throw std::invalid_argument("unknown embedded instance: " + std::string(name));
}

}  // namespace pareto_tas::datasets
