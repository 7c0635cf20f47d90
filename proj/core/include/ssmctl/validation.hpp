#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ssmctl {

/// Deliberate corruption for exercising the suite itself.
enum class Fault {
  None,
  /// Negates the first transition entry of every system handed to the
  /// implementation (the oracles see the original).
  FlipTransitionSign,
};

struct ValidationOptions {
  /// Caps every check's bound: effective = min(documented, tolerance).
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  Fault fault = Fault::None;
};

struct ValidationCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool passed = false;
};

/// Runs the invariant suites of the core and influence layers on seeded
/// instances.
std::vector<ValidationCheck> run_validation(const ValidationOptions& options);

}  // namespace ssmctl
