#ifndef CSP_REPORT_HPP
#define CSP_REPORT_HPP

#include <map>
#include <string>

#include "csp/manifold.hpp"
#include "csp/sweep.hpp"

namespace csp {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Columns: eps, metric, aux.
void write_sweep_csv(const SweepTable& table, const std::string& path);

/// Columns: y, z_0..z_{n-1}, order, eps, residual.
void write_cspm_csv(const CspmTable& table, const std::string& path);

/*!
 * JSON report of one sweep: experiment name, parameters, rows, fitted slope,
 * intercept, r2, the acceptance band for (kind, q), and the pass flag. The
 * same document is consumed by the `report` CLI subcommand.
 */
std::string sweep_report_json(const SweepTable& table);

/// Writes text to a file, creating parent-less paths as-is; IO failures throw
/// Error.
void write_text_file(const std::string& path, const std::string& content);

/*!
 * Flat key=value configuration. Lines starting with '#' (after leading
 * blanks) and blank lines are skipped; keys and values are trimmed. Duplicate
 * keys keep the last occurrence.
 */
std::map<std::string, std::string> parse_config(const std::string& path);

/*!
 * Builds an Experiment from config keys (experiment, system, kappa, lambda, q,
 * mode, policy, scheme, grid.min, grid.max, grid.nodes, x0.y, x0.z, horizon,
 * dt) and reads eps.list (comma-separated) into eps_list when present.
 * Unknown keys other than "out" and "json" throw PreconditionError.
 */
Experiment experiment_from_config(const std::map<std::string, std::string>& kv,
                                  std::vector<double>& eps_list);

/// One line per report document: experiment, q, slope, band, pass.
/// Returns false if any document has pass = false.
bool summarize_reports(const std::vector<std::string>& json_paths, std::string& rendered);

}  // namespace csp

#endif
