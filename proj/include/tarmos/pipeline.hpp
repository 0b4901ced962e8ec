#ifndef TARMOS_PIPELINE_HPP
#define TARMOS_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace tarmos {

struct CliOptions {
  std::string plan_path;
  std::optional<std::uint64_t> seed;     // master-seed override
  std::optional<std::size_t> m;          // imputation-count override
  std::optional<std::string> out_dir;    // output-directory override
  int threads = 0;                       // 0 = TARMOS_THREADS or 1
};

// Executes one subcommand (explore | impute | analyze | sensitivity |
// advise | simulate | report).  Returns the process exit code: 0 ok,
// 2 plan invalid, 3 data error, 4 numerical failure.  Errors print a
// single machine-readable line on stderr.
int run_command(const std::string& command, const CliOptions& opts);

}  // namespace tarmos

#endif
