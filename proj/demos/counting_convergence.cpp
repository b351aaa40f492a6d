// Counts distinguishable orientations inside a span at growing trial
// budgets and shows D(n)/sqrt(n) settling onto the quadrature value.
#include <cstdio>

#include "statdist/statdist.hpp"

int main() {
  using namespace statdist;
  const auto law = laws::ResponseLaw::cosine_squared();
  const double theta1 = 0.2;
  const double theta2 = 1.2;

  const auto series =
      finite::distance_by_counting(law, theta1, theta2, finite::default_schedule());
  const auto reference = core::statistical_distance(law, theta1, theta2);

  std::printf("span [%g, %g] under the %s law\n", theta1, theta2,
              law.describe().c_str());
  std::printf("%10s %10s %14s\n", "n", "D", "D/sqrt(n)");
  for (const auto& point : series.points) {
    std::printf("%10llu %10llu %14.8f\n",
                static_cast<unsigned long long>(point.n),
                static_cast<unsigned long long>(point.count), point.estimate);
  }
  std::printf("richardson extrapolation: %.8f\n", series.richardson);
  std::printf("quadrature distance:      %.8f\n", reference.value);
  std::printf("closed form |theta2-theta1|: %.8f\n", theta2 - theta1);
  return 0;
}
