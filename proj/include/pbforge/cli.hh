#ifndef PBFORGE_GUARD_PBFORGE_CLI_HH
#define PBFORGE_GUARD_PBFORGE_CLI_HH

#include <ostream>
#include <string>
#include <vector>

namespace pbforge
{
    /// Exit codes shared by every subcommand.
    namespace exit_code
    {
        constexpr int ok = 0;
        constexpr int rejected = 1;
        constexpr int error = 2;
        constexpr int too_large = 3;
        constexpr int skipped = 4;
    }

    /// Version tag carried by every --json report.
    inline constexpr const char * report_schema = "pbforge.report/1";

    auto run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int;
    auto run_cli(int argc, char ** argv, std::ostream & out, std::ostream & err) -> int;
}

#endif
