#pragma once

#include <socmap/kriging/winsorize.hpp>
#include <socmap/validation/cv.hpp>
#include <socmap/validation/regression_kriging.hpp>
#include <socmap/variogram/empirical.hpp>
#include <socmap/variogram/matern.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace socmap::validation {

// model,metric,mean,ci_low,ci_high,n_valid,n_failed
void write_summary(std::ostream& out, const cv_report& report);
// model,repetition,valid,metric,value
void write_long(std::ostream& out, const cv_report& report);
// metric,model_a,model_b,p_value,adjusted_alpha,status (one row per unordered pair)
void write_significance(std::ostream& out, const cv_report& report);
// model,repetition,site_id,observed,predicted
void write_plot_points(std::ostream& out, const cv_report& report);
// model,site_id,x_km,y_km,n,mean_error
void write_site_errors(std::ostream& out, const cv_report& report);
// model,repetition,fold,valid,failure,trees,c0,c1,phi,kappa,c,flagged,donors,theta_bar_before,...
void write_diagnostics(std::ostream& out, const cv_report& report);

// Writes all of the above as <dir>/cv_*.csv and returns the paths written.
std::vector<std::filesystem::path> write_cv_report(const std::filesystem::path& dir, const cv_report& report);

// site_id,x_km,y_km,brt_z,u_hat,sigma2,psi,y_hat
void write_predictions(std::ostream& out, std::span<const site_prediction> rows);

// site_id,u,U_minus,U_plus,u_star,flag
void write_winsorize(std::ostream& out, std::span<const std::string> site_ids, const kriging::winsorize_result& w);

// lower_km,upper_km,mean_distance_km,pairs,gamma,model_gamma
void write_variogram(std::ostream& out, const variogram::empirical_variogram& ev, const variogram::matern_model& model);

// name,value rows for a fitted model.
void write_matern(std::ostream& out, const variogram::matern_model& model);

}  // namespace socmap::validation
