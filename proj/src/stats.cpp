#include "canonrep/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <limits>
#include <numeric>

#include "canonrep/error.hpp"

namespace canonrep {

ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw Error(ErrorKind::InvalidArgument, "observed counts and probabilities must match and be non-empty");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (total == 0) throw Error(ErrorKind::InvalidArgument, "no observations");

  std::vector<double> exp_kept, obs_kept;
  double pooled_exp = 0, pooled_obs = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double e = probs[i] * total;
    if (e < min_expected) {
      pooled_exp += e;
      pooled_obs += static_cast<double>(observed[i]);
    } else {
      exp_kept.push_back(e);
      obs_kept.push_back(static_cast<double>(observed[i]));
    }
  }
  if (pooled_exp > 0 || pooled_obs > 0) {
    if (pooled_exp >= min_expected || exp_kept.empty()) {
      exp_kept.push_back(pooled_exp);
      obs_kept.push_back(pooled_obs);
    } else {
      auto smallest = std::min_element(exp_kept.begin(), exp_kept.end()) - exp_kept.begin();
      exp_kept[static_cast<std::size_t>(smallest)] += pooled_exp;
      obs_kept[static_cast<std::size_t>(smallest)] += pooled_obs;
    }
  }

  ChiSquare out;
  out.categories = exp_kept.size();
  for (std::size_t i = 0; i < exp_kept.size(); ++i) {
    if (exp_kept[i] == 0) {
      if (obs_kept[i] > 0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0;
        out.dof = exp_kept.size() > 1 ? exp_kept.size() - 1 : 0;
        return out;
      }
      continue;
    }
    const double diff = obs_kept[i] - exp_kept[i];
    out.statistic += diff * diff / exp_kept[i];
  }
  out.dof = exp_kept.size() > 1 ? exp_kept.size() - 1 : 0;
  out.p_value = out.dof == 0 ? 1.0 : boost::math::gamma_q(static_cast<double>(out.dof) / 2, out.statistic / 2);
  return out;
}

}  // namespace canonrep
