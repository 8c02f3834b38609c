#include <socmap/validation/report_io.hpp>

#include <socmap/error.hpp>
#include <socmap/util/csv.hpp>

#include <fstream>
#include <ostream>

namespace socmap::validation {

namespace {

using csv::escape;
using csv::format_report;

std::string_view status_name(pair_status s) {
  switch (s) {
    case pair_status::significant: return "significant";
    case pair_status::not_significant: return "not_significant";
    default: return "untestable";
  }
}

void write_theta(std::ostream& out, const kriging::theta_stats& t) {
  out << format_report(t.theta_bar) << ',' << format_report(t.theta_med);
}

}  // namespace

void write_summary(std::ostream& out, const cv_report& report) {
  out << "model,metric,mean,ci_low,ci_high,n_valid,n_failed\n";
  for (std::size_t s = 0; s < report.models.size(); ++s)
    for (std::size_t k = 0; k < all_metrics.size(); ++k) {
      const auto& m = report.summary[s][k];
      out << escape(report.models[s]) << ',' << to_string(all_metrics[k]) << ',' << format_report(m.mean) << ','
          << format_report(m.ci_lo) << ',' << format_report(m.ci_hi) << ',' << m.n << ',' << report.failed[s] << '\n';
    }
}

void write_long(std::ostream& out, const cv_report& report) {
  out << "model,repetition,valid,metric,value\n";
  for (std::size_t s = 0; s < report.models.size(); ++s)
    for (std::size_t r = 0; r < report.repetitions; ++r) {
      const auto& res = report.at(s, r);
      for (auto m : all_metrics) {
        out << escape(report.models[s]) << ',' << r + 1 << ',' << (res.valid ? 1 : 0) << ',' << to_string(m) << ',';
        out << (res.valid ? format_report(res.metrics.get(m)) : std::string("NA")) << '\n';
      }
    }
}

void write_significance(std::ostream& out, const cv_report& report) {
  out << "metric,model_a,model_b,p_value,adjusted_alpha,status\n";
  if (report.models.size() < 2) return;
  for (auto m : all_metrics) {
    const auto sig = compare_models(report, m);
    for (std::size_t i = 0; i < sig.models.size(); ++i)
      for (std::size_t j = i + 1; j < sig.models.size(); ++j) {
        const auto& c = sig.cells[i][j];
        out << to_string(m) << ',' << escape(sig.models[i]) << ',' << escape(sig.models[j]) << ','
            << (c.status == pair_status::untestable ? std::string("NA") : format_report(c.p)) << ','
            << format_report(sig.adjusted_alpha) << ',' << status_name(c.status) << '\n';
      }
  }
}

void write_plot_points(std::ostream& out, const cv_report& report) {
  out << "model,repetition,site_id,observed,predicted\n";
  for (std::size_t s = 0; s < report.models.size(); ++s)
    for (std::size_t r = 0; r < report.repetitions; ++r) {
      const auto& res = report.at(s, r);
      if (!res.valid) continue;
      for (std::size_t i = 0; i < res.rows.size(); ++i)
        out << escape(report.models[s]) << ',' << r + 1 << ',' << escape(report.site_ids[res.rows[i]]) << ','
            << format_report(report.observed[res.rows[i]]) << ',' << format_report(res.predicted[i]) << '\n';
    }
}

void write_site_errors(std::ostream& out, const cv_report& report) {
  out << "model,site_id,x_km,y_km,n,mean_error\n";
  const auto n_sites = report.site_ids.size();
  for (std::size_t s = 0; s < report.models.size(); ++s) {
    std::vector<double> sum(n_sites, 0.0);
    std::vector<std::size_t> count(n_sites, 0);
    for (std::size_t r = 0; r < report.repetitions; ++r) {
      const auto& res = report.at(s, r);
      if (!res.valid) continue;
      for (std::size_t i = 0; i < res.rows.size(); ++i) {
        sum[res.rows[i]] += res.predicted[i] - report.observed[res.rows[i]];
        ++count[res.rows[i]];
      }
    }
    for (std::size_t i = 0; i < n_sites; ++i) {
      if (count[i] == 0) continue;
      out << escape(report.models[s]) << ',' << escape(report.site_ids[i]) << ',' << format_report(report.sites[i].x_km)
          << ',' << format_report(report.sites[i].y_km) << ',' << count[i] << ','
          << format_report(sum[i] / static_cast<double>(count[i])) << '\n';
    }
  }
}

void write_diagnostics(std::ostream& out, const cv_report& report) {
  out << "model,repetition,fold,valid,failure,trees,c0,c1,phi,kappa,c,flagged,donors,"
         "theta_bar_before,theta_med_before,theta_bar_after,theta_med_after\n";
  for (std::size_t s = 0; s < report.models.size(); ++s)
    for (std::size_t r = 0; r < report.repetitions; ++r) {
      const auto& res = report.at(s, r);
      for (std::size_t f = 0; f < res.folds.size(); ++f) {
        const auto& d = res.folds[f];
        out << escape(report.models[s]) << ',' << r + 1 << ',' << f + 1 << ',' << (d.failure.empty() ? 1 : 0) << ','
            << escape(d.failure) << ',' << d.trees << ',';
        if (d.spatial && d.failure.empty()) {
          out << format_report(d.model.nugget) << ',' << format_report(d.model.partial_sill) << ','
              << format_report(d.model.range) << ',' << format_report(d.model.smoothness) << ',' << format_report(d.c)
              << ',' << d.flagged << ',' << d.donors << ',';
          write_theta(out, d.before);
          out << ',';
          write_theta(out, d.after);
        } else {
          out << "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA,NA";
        }
        out << '\n';
      }
    }
}

std::vector<std::filesystem::path> write_cv_report(const std::filesystem::path& dir, const cv_report& report) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, void (*fn)(std::ostream&, const cv_report&)) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    fn(out, report);
    written.push_back(path);
  };
  emit("cv_summary.csv", &write_summary);
  emit("cv_long.csv", &write_long);
  emit("cv_significance.csv", &write_significance);
  emit("cv_plot_points.csv", &write_plot_points);
  emit("cv_site_errors.csv", &write_site_errors);
  emit("cv_diagnostics.csv", &write_diagnostics);
  return written;
}

void write_predictions(std::ostream& out, std::span<const site_prediction> rows) {
  out << "site_id,x_km,y_km,brt_z,u_hat,sigma2,psi,y_hat\n";
  for (const auto& p : rows)
    out << escape(p.site_id) << ',' << format_report(p.x_km) << ',' << format_report(p.y_km) << ','
        << format_report(p.brt_z) << ',' << format_report(p.u_hat) << ',' << format_report(p.sigma2) << ','
        << format_report(p.psi) << ',' << format_report(p.y_hat) << '\n';
}

void write_winsorize(std::ostream& out, std::span<const std::string> site_ids, const kriging::winsorize_result& w) {
  if (site_ids.size() != w.u_star.size()) throw data_error("site id count does not match the Winsorizing result");
  out << "site_id,u,U_minus,U_plus,u_star,flag\n";
  for (std::size_t i = 0; i < site_ids.size(); ++i) {
    out << escape(site_ids[i]) << ',' << format_report(w.u[i]) << ','
        << format_report(w.u_minus[i]) << ',' << format_report(w.u_plus[i]) << ',' << format_report(w.u_star[i]) << ','
        << kriging::to_string(w.flags[i]) << '\n';
  }
}

void write_variogram(std::ostream& out, const variogram::empirical_variogram& ev, const variogram::matern_model& model) {
  out << "lower_km,upper_km,mean_distance_km,pairs,gamma,model_gamma\n";
  for (const auto& b : ev.bins)
    out << format_report(b.lower_km) << ',' << format_report(b.upper_km) << ',' << format_report(b.mean_distance_km)
        << ',' << b.pair_count << ',' << format_report(b.gamma) << ','
        << format_report(variogram::matern_gamma(model, b.mean_distance_km)) << '\n';
}

void write_matern(std::ostream& out, const variogram::matern_model& m) {
  out << "parameter,value\n";
  out << "c0," << format_report(m.nugget) << '\n';
  out << "c1," << format_report(m.partial_sill) << '\n';
  out << "phi_km," << format_report(m.range) << '\n';
  out << "kappa," << format_report(m.smoothness) << '\n';
  if (m.sill() > 0.0) out << "spatial_dependence," << format_report(variogram::spatial_dependence(m)) << '\n';
}

}  // namespace socmap::validation
