#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "shotrf/error.hpp"

namespace shotrf {

/// A failed quality evaluation inside the search, tagged with its RF.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double rf) : Error(what), rf_(rf) {}
  double rf() const { return rf_; }

 private:
  double rf_;
};

struct LabelSearchConfig {
  double target = 91.0;
  double tol = 0.1;
  std::size_t max_iters = 12;
};

struct LabelResult {
  double rf_label = 0;
  double achieved = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool reachable = true;  // false when the target lies beyond both rails
};

/// Bracketing search for the RF whose measured quality is within tol of
/// target, over [0, 51]. `encode_and_measure` must be non-increasing in RF.
///
/// Both rails are probed first. The bracket is then narrowed with TOMS 748
/// (Alefeld, Potra and Shi; from Boost.Math) applied to the logit of quality,
/// log(q / (100 - q)), stopping as soon as a probe lands within tol. At most
/// max_iters + 2 evaluations are made.
/// Exceptions thrown by the callback are rethrown as EvaluationError.
LabelResult search_rf(const std::function<double(double)>& encode_and_measure, const LabelSearchConfig& cfg);

/// Label store: one CSV record per segment.
struct LabelRecord {
  std::uint64_t source_id = 0;
  LabelResult result;
};

/// Header `source_id,rf_label,achieved,evaluations,converged,reachable`.
void write_labels(std::ostream& out, const std::vector<LabelRecord>& labels);
std::vector<LabelRecord> read_labels(std::istream& in);
void write_labels_file(const std::string& path, const std::vector<LabelRecord>& labels);
std::vector<LabelRecord> read_labels_file(const std::string& path);

}  // namespace shotrf
