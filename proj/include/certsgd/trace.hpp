#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "certsgd/engine.hpp"
#include "certsgd/setup.hpp"

namespace certsgd {

struct TraceRow {
  std::uint64_t t = 0;
  double eta_t = 0.0;
  double s_t = 0.0;
  double v_t = 0.0;
  double g_norm2 = 0.0;
  double sum_eta2_g2 = 0.0;
  double u_obs = 0.0;
  std::optional<double> f_bar;
  std::optional<double> z_t;
  std::optional<double> x_bar;
  std::optional<double> log_mixture;
};

using Trace = std::vector<TraceRow>;

// Row for the step just completed; oracle columns filled when available.
TraceRow make_trace_row(const RunState& state, const StepRecord& step,
                        const Setup& setup);

// Keeps every stride-th row (and always the first), plus an optional bounded
// tail of the most recent rows.
class TraceRecorder {
 public:
  explicit TraceRecorder(std::uint64_t stride = 1) : stride_(stride ? stride : 1) {}

  bool wants(std::uint64_t t) const { return t == 1 || t % stride_ == 0; }
  void push(TraceRow row) { rows_.push_back(std::move(row)); }
  const Trace& rows() const { return rows_; }
  Trace take() { return std::move(rows_); }

 private:
  std::uint64_t stride_;
  Trace rows_;
};

// 17-significant-digit decimal rendering; empty string for missing values.
std::string format_double(double v);

void write_trace_csv(std::ostream& os, const Trace& rows);
void write_trace_csv(const std::string& path, const Trace& rows);

}  // namespace certsgd
