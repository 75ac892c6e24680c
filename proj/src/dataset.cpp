#include "reidfit/dataset.hpp"

namespace reidfit {

std::vector<std::size_t> zone_violations(const Dataset& d) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const TimeTimePoint p{d.records[i].upstream_time, d.records[i].journey_time};
    if (classify(d.windows, p) != Zone::kObservable) out.push_back(i);
  }
  return out;
}

}  // namespace reidfit
