#ifndef ELASTOROUGH_REPORT_IO_HPP
#define ELASTOROUGH_REPORT_IO_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elastorough/harness.hpp"

namespace elastorough
{

// JSON views of the reports. Wall times appear here only, never in CSV tables.
nlohmann::json to_json(const BoundReport &b);
nlohmann::json to_json(const StabilityConstants &s);
nlohmann::json to_json(const SymbolBoundsReport &r);
nlohmann::json to_json(const RunReport &r);
nlohmann::json to_json(const SweepTable &t);
nlohmann::json to_json(const McReport &r);
nlohmann::json to_json(const PushforwardReport &r);

// CSV tables, one row per run / sweep point / sample, numbers printed with 17 digits.
std::string runs_csv(const std::vector<RunReport> &runs);
std::string sweep_csv(const SweepTable &t);
std::string mc_csv(const McReport &r);
std::string pushforward_csv(const PushforwardReport &r);
std::string constants_csv(const BoundReport &b, const StabilityConstants &s);

// Field values on the collocation grid: i1,i2,u1_re,u1_im,u2_re,u2_im,u3_re,u3_im.
std::string trace_csv(const SpectralGrid &grid, const std::vector<Vec3c> &values);
std::vector<Vec3c> read_trace_csv(const std::string &path, const SpectralGrid &grid);

void ensure_directory(const std::string &dir);
void write_text(const std::string &path, const std::string &text);
void write_json(const std::string &path, const nlohmann::json &j);

// error.json with the exception category, message and exit code.
void write_error(const std::string &dir, const std::string &kind, const std::string &message, int exit_code);

}  // namespace elastorough

#endif  // ELASTOROUGH_REPORT_IO_HPP
