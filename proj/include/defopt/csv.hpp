#ifndef DEFOPT_CSV_HPP
#define DEFOPT_CSV_HPP

#include <filesystem>
#include <string>

#include "defopt/barrier.hpp"
#include "defopt/descent.hpp"
#include "defopt/grid.hpp"
#include "defopt/study.hpp"

namespace defopt {

// ScalarField CSV: header "x,y,value", one row per interior node in
// row-major order, 9+ significant digits.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field_csv(const std::filesystem::path& path, const Grid& g);

void write_run_report_csv(const std::filesystem::path& path, const RunReport& report);
void write_outer_log_csv(const std::filesystem::path& path,
                         const std::vector<OuterRecord>& log);
void write_continuation_csv(const std::filesystem::path& path,
                            const ContinuationResult& result);

// Named built-in fields: "minx", "scaled_minx", "zero", "constant:<value>".
ScalarField builtin_field(const std::string& name, const Grid& g);
bool is_builtin_field(const std::string& name);

}  // namespace defopt

#endif
