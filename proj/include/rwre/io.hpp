#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "rwre/experiment.hpp"

namespace rwre {

// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_estimates_csv(std::ostream& os, const std::vector<EstimateRecord>& records,
                                const FamilyShape& shape) {
  os << "rep,n,t_n,estimator,coord,value,flag\n";
  for (const auto& rec : records) {
    for (int c = 0; c < shape.dim(); ++c) {
      os << rec.rep << ',' << rec.n << ',' << rec.t_n << ',' << estimator_name(rec.estimator)
         << ',' << shape.param_name(c) << ',' << format_double(rec.theta[static_cast<std::size_t>(c)])
         << ',' << flag_name(rec.flag) << '\n';
    }
  }
}

inline void write_summary_csv(std::ostream& os, const SummaryTable& table) {
  os << "n,estimator,coord,count,used,excluded,mean,bias,variance,sd,q1,median,q3,"
        "whisker_lo,whisker_hi,outliers\n";
  for (const auto& r : table.rows) {
    os << r.n << ',' << estimator_name(r.estimator) << ',' << r.coord << ',' << r.count << ','
       << r.used << ',' << r.excluded << ',' << format_double(r.mean) << ','
       << format_double(r.bias) << ',' << format_double(r.variance) << ',' << format_double(r.sd)
       << ',' << format_double(r.q1) << ',' << format_double(r.median) << ','
       << format_double(r.q3) << ',' << format_double(r.whisker_lo) << ','
       << format_double(r.whisker_hi) << ',' << r.outliers << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& os, const StepCounts& counts) {
  os << "site,left,right\n";
  for (long x = counts.lowest_visited; x <= counts.n; ++x)
    os << x << ',' << counts.left_at(x) << ',' << counts.right_at(x) << '\n';
}

inline void write_moments_csv(std::ostream& os, const HistoryStats& stats) {
  os << "h_minus,h_plus,m,v_left,v_right\n";
  for (const auto& [hl, hr] : stats.histories()) {
    const long long cl = stats.count_left(hl, hr);
    const long long cr = stats.count_right(hl, hr);
    const long long m = cl + cr;
    os << hl << ',' << hr << ',' << m << ','
       << format_double(static_cast<double>(cl) / static_cast<double>(m)) << ','
       << format_double(static_cast<double>(cr) / static_cast<double>(m)) << '\n';
  }
}

inline void write_stationary_csv(std::ostream& os, const StationaryLaw& law) {
  os << "k,pi_hat,stderr,pi_tail_bound\n";
  for (std::size_t k = 0; k < law.pi.size(); ++k) {
    os << k << ',' << format_double(law.pi[k]) << ',' << format_double(law.se[k]) << ','
       << format_double(law.tail_mass[k]) << '\n';
  }
}

}  // namespace rwre
