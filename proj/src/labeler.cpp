#include "shotrf/labeler.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "shotrf/error.hpp"
#include "shotrf/model.hpp"
#include "shotrf/segmenter.hpp"
#include "shotrf/textio.hpp"

namespace shotrf {

namespace {

double logit_quality(double v) {
  const double q = std::clamp(v, 1e-6, 100.0 - 1e-6);
  return std::log(q / (100.0 - q));
}

}  // namespace

LabelResult search_rf(const std::function<double(double)>& encode_and_measure, const LabelSearchConfig& cfg) {
  if (!(cfg.tol > 0)) throw Error("search_rf: tol must be positive");
  if (cfg.max_iters < 1) throw Error("search_rf: max_iters must be at least 1");

  LabelResult best;
  double best_err = INFINITY;
  auto evaluate = [&](double rf) {
    double v;
    try {
      v = encode_and_measure(rf);
    } catch (const std::exception& e) {
      throw EvaluationError("quality evaluation failed at rf=" + format_double(rf) + ": " + e.what(), rf);
    }
    ++best.evaluations;
    if (!std::isfinite(v)) throw EvaluationError("quality evaluation at rf=" + format_double(rf) + " is not finite", rf);
    const double err = std::abs(v - cfg.target);
    if (err < best_err) {
      best_err = err;
      best.rf_label = rf;
      best.achieved = v;
    }
    return v;
  };
  auto done = [&] {
    best.converged = best_err <= cfg.tol;
    return best;
  };

  double lo = kRfMin, hi = kRfMax;
  double v_lo = evaluate(lo);
  if (std::abs(v_lo - cfg.target) <= cfg.tol) return done();
  double v_hi = evaluate(hi);
  if (std::abs(v_hi - cfg.target) <= cfg.tol) return done();

  // Quality falls with RF, so the target is bracketed iff v_lo > target > v_hi.
  if (v_lo < cfg.target || v_hi > cfg.target) {
    best.reachable = false;
    best.rf_label = v_lo < cfg.target ? lo : hi;
    best.achieved = v_lo < cfg.target ? v_lo : v_hi;
    best.converged = false;
    return best;
  }

  // TOMS 748 on the logit of quality: exact in one step for ceiling-100
  // logistic curves and bracket-safe for everything else.
  struct Converged {};
  const double target_logit = logit_quality(cfg.target);
  auto g = [&](double rf) {
    const double v = evaluate(rf);
    if (std::abs(v - cfg.target) <= cfg.tol) throw Converged{};
    return logit_quality(v) - target_logit;
  };
  std::uintmax_t iters = cfg.max_iters;
  try {
    boost::math::tools::toms748_solve(g, lo, hi, logit_quality(v_lo) - target_logit, logit_quality(v_hi) - target_logit,
                                      [](double a, double b) { return std::abs(a - b) < 1e-9; }, iters);
  } catch (const Converged&) {
  }
  return done();
}

void write_labels(std::ostream& out, const std::vector<LabelRecord>& labels) {
  out << "source_id,rf_label,achieved,evaluations,converged,reachable\n";
  for (const auto& l : labels) {
    out << format_source_id(l.source_id) << ',' << format_double(l.result.rf_label) << ','
        << format_double(l.result.achieved) << ',' << l.result.evaluations << ',' << (l.result.converged ? 1 : 0)
        << ',' << (l.result.reachable ? 1 : 0) << '\n';
  }
}

std::vector<LabelRecord> read_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "source_id,rf_label,achieved,evaluations,converged,reachable") {
    throw ParseError("label store line 1: unexpected header");
  }
  std::vector<LabelRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    const std::string where = "label store line " + std::to_string(line_no);
    if (cells.size() != 6) throw ParseError(where + ": expected 6 cells");
    try {
      LabelRecord r;
      r.source_id = parse_source_id(cells[0]);
      r.result.rf_label = parse_double(cells[1], "rf_label");
      r.result.achieved = parse_double(cells[2], "achieved");
      r.result.evaluations = static_cast<std::size_t>(parse_int(cells[3], "evaluations"));
      r.result.converged = parse_int(cells[4], "converged") != 0;
      r.result.reachable = parse_int(cells[5], "reachable") != 0;
      out.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

void write_labels_file(const std::string& path, const std::vector<LabelRecord>& labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write labels " + path);
  write_labels(out, labels);
}

std::vector<LabelRecord> read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open labels " + path);
  return read_labels(in);
}

}  // namespace shotrf
