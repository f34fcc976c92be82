#include "certsgd/trace.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace certsgd {

TraceRow make_trace_row(const RunState& state, const StepRecord& step,
                        const Setup& setup) {
  TraceRow row;
  row.t = step.t;
  row.eta_t = step.eta;
  row.s_t = state.s_t();
  row.v_t = state.v_t();
  row.g_norm2 = step.g_norm2;
  row.sum_eta2_g2 = state.eta2_g2();
  row.u_obs = u_obs(row.s_t, row.v_t, row.sum_eta2_g2, setup.confidence);
  if (state.oracle) {
    row.f_bar = weighted_suboptimality(state);
    row.z_t = step.z_t;
    row.x_bar = state.xbar();
    row.log_mixture =
        log_mixture(state.xbar(), state.sigma2_sum(setup.confidence.sigma2()),
                    setup.confidence, setup.mixture);
  }
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}
}  // namespace

void write_trace_csv(std::ostream& os, const Trace& rows) {
  os << "t,eta_t,S_t,V_t,g_norm2,sum_eta2_g2,U_obs,F_bar,Z_t,X_bar,log_mixture\n";
  for (const auto& r : rows) {
    os << r.t << ',' << format_double(r.eta_t) << ',' << format_double(r.s_t)
       << ',' << format_double(r.v_t) << ',' << format_double(r.g_norm2) << ','
       << format_double(r.sum_eta2_g2) << ',' << format_double(r.u_obs) << ','
       << opt(r.f_bar) << ',' << opt(r.z_t) << ',' << opt(r.x_bar) << ','
       << opt(r.log_mixture) << '\n';
  }
}

void write_trace_csv(const std::string& path, const Trace& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  write_trace_csv(out, rows);
}

}  // namespace certsgd
