#include <pbforge/checker.hh>
#include <pbforge/cli.hh>
#include <pbforge/encodings.hh>
#include <pbforge/errors.hh>
#include <pbforge/oracle.hh>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

using nlohmann::json;
using std::optional;
using std::ostream;
using std::size_t;
using std::string;
using std::vector;

namespace fs = std::filesystem;

namespace pbforge
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        auto millis_since(Clock::time_point start) -> double
        {
            return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }

        auto stats_json(const CheckStats & s) -> json
        {
            return json{{"steps", s.steps}, {"constraints_created", s.constraints_created}, {"constraints_deleted", s.constraints_deleted},
                {"max_db_size", s.max_db_size}, {"subproofs", s.subproofs}, {"rup_fallbacks", s.rup_fallbacks}, {"rules", s.rules},
                {"pol_operators", s.pol_operators}};
        }

        auto report(const string & command) -> json
        {
            return json{{"schema", report_schema}, {"command", command}};
        }

        auto split_list(const string & text) -> vector<string>
        {
            vector<string> parts;
            std::stringstream in{text};
            string item;
            while (std::getline(in, item, ','))
                parts.push_back(item);
            return parts;
        }

        auto parse_sizes(const string & text) -> vector<size_t>
        {
            vector<size_t> result;
            for (const auto & item : split_list(text)) {
                try {
                    size_t used = 0;
                    auto value = std::stoull(item, &used);
                    if (used != item.size())
                        throw InvalidInstance{"bad number '" + item + "'"};
                    result.push_back(value);
                }
                catch (const std::logic_error &) {
                    throw InvalidInstance{"bad number '" + item + "'"};
                }
            }
            return result;
        }

        /// Accepts "2,3,1", "01101" (one digit per entry) or letter colorings such as "RRBB"
        /// (R=0, B=1, G=2, Y=3, ...).
        auto parse_witness(const string & text) -> Witness
        {
            Witness w;
            if (text.find(',') != string::npos) {
                for (const auto & item : split_list(text)) {
                    try {
                        size_t used = 0;
                        auto value = std::stoll(item, &used);
                        if (used != item.size())
                            throw InvalidWitness{"bad witness entry '" + item + "'"};
                        w.push_back(value);
                    }
                    catch (const std::logic_error &) {
                        throw InvalidWitness{"bad witness entry '" + item + "'"};
                    }
                }
                return w;
            }
            static const string letters = "RBGYCMKW";
            for (char ch : text) {
                if (ch >= '0' && ch <= '9')
                    w.push_back(ch - '0');
                else if (auto p = letters.find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch)))); p != string::npos)
                    w.push_back(static_cast<long long>(p));
                else
                    throw InvalidWitness{string{"bad witness character '"} + ch + "'"};
            }
            return w;
        }

        /// Family parameters shared by encode, witness and pipeline.
        struct FamilyOptions
        {
            string family;
            size_t p = 0, k = 0, n = 0, colors = 2, ap_length = 3, s = 0, t = 0, pigeons = 0, holes = 0, bins = 0, cap = 0;
            string sizes, parts;

            auto add_to(CLI::App & app) -> void
            {
                app.add_option("family", family,
                       "paley-is, langford, schur, vdw, ramsey, equitable, php or binpacking")
                    ->required();
                app.add_option("--p", p, "Paley prime");
                app.add_option("--k", k, "independent set size or number of colors");
                app.add_option("--n", n, "problem size");
                app.add_option("--colors", colors, "colors (schur, vdw)");
                app.add_option("--L", ap_length, "progression length (vdw)");
                app.add_option("--s", s, "red clique size (ramsey)");
                app.add_option("--t", t, "blue clique size (ramsey)");
                app.add_option("--parts", parts, "part sizes of a complete multipartite graph (equitable), e.g. 3,3,1");
                app.add_option("--pigeons", pigeons, "pigeons (php)");
                app.add_option("--holes", holes, "holes (php)");
                app.add_option("--sizes", sizes, "item sizes (binpacking), e.g. 10,9,8");
                app.add_option("--bins", bins, "bins (binpacking)");
                app.add_option("--cap", cap, "bin capacity (binpacking)");
            }

            auto instance() const -> ProblemInstance
            {
                if (family == "paley-is")
                    return IndependentSet{paley_graph(p), k};
                if (family == "langford")
                    return Langford{n};
                if (family == "schur")
                    return Schur{n, colors};
                if (family == "vdw")
                    return VanDerWaerden{n, colors, ap_length};
                if (family == "ramsey")
                    return Ramsey{n, s, t};
                if (family == "equitable")
                    return EquitableColoring{complete_multipartite(parse_sizes(parts)), k};
                if (family == "php")
                    return PigeonHole{pigeons, holes};
                if (family == "binpacking")
                    return BinPacking{parse_sizes(sizes), bins, cap};
                throw InvalidInstance{"unknown family '" + family + "'"};
            }
        };

        struct CheckJob
        {
            string opb_path, proof_path;
            Verdict verdict;
            bool io_error = false;
            double wall_ms = 0;
        };

        auto run_check_job(CheckJob & job, const CheckOptions & options) -> void
        {
            Formula formula;
            try {
                formula = read_opb_file(job.opb_path);
            }
            catch (const ParseError & e) {
                job.verdict.detail = job.opb_path + ": " + e.what();
                job.verdict.failing_line = e.line();
                job.verdict.parse_error = true;
                return;
            }
            catch (const std::exception & e) {
                job.verdict.detail = e.what();
                job.io_error = true;
                return;
            }

            std::ifstream in{job.proof_path};
            if (! in) {
                job.verdict.detail = "cannot open " + job.proof_path;
                job.io_error = true;
                return;
            }
            ProofReader reader{in};
            auto start = Clock::now();
            job.verdict = check(formula, reader, options);
            job.wall_ms = millis_since(start);
        }

        auto job_exit_code(const CheckJob & job) -> int
        {
            if (job.io_error || job.verdict.parse_error)
                return exit_code::error;
            return job.verdict.status == VerdictStatus::Rejected ? exit_code::rejected : exit_code::ok;
        }

        auto cmd_check(const vector<string> & files, const CheckOptions & options, bool as_json, ostream & out, ostream & err) -> int
        {
            if (files.size() % 2 != 0) {
                err << "check expects <opb> <proof> pairs\n";
                return exit_code::error;
            }
            vector<CheckJob> jobs;
            for (size_t i = 0; i < files.size(); i += 2)
                jobs.push_back(CheckJob{files[i], files[i + 1], {}, false, 0});

            std::atomic<size_t> next{0};
            auto worker = [&] {
                for (size_t i; (i = next++) < jobs.size();)
                    run_check_job(jobs[i], options);
            };
            size_t workers = std::min<size_t>(jobs.size(), std::max(1u, std::thread::hardware_concurrency()));
            vector<std::thread> pool;
            for (size_t w = 1; w < workers; ++w)
                pool.emplace_back(worker);
            worker();
            for (auto & t : pool)
                t.join();

            int code = exit_code::ok;
            json runs = json::array();
            for (const auto & job : jobs) {
                int job_code = job_exit_code(job);
                code = std::max(code, job_code);
                if (as_json) {
                    json run{{"inputs", {job.opb_path, job.proof_path}}, {"verdict", job.io_error ? "IOError" : to_string(job.verdict.status)},
                        {"detail", job.verdict.detail}, {"parse_error", job.verdict.parse_error}, {"exit_code", job_code},
                        {"wall_ms", job.wall_ms}, {"stats", stats_json(job.verdict.stats)}};
                    run["failing_line"] = job.verdict.failing_line ? json(*job.verdict.failing_line) : json(nullptr);
                    runs.push_back(std::move(run));
                }
                else if (job_code == exit_code::ok)
                    out << job.proof_path << ": " << to_string(job.verdict.status) << " (" << job.verdict.detail << ")\n";
                else {
                    auto & stream = job_code == exit_code::error ? err : out;
                    stream << job.proof_path << ": " << (job.io_error ? "error" : job.verdict.parse_error ? "parse error" : "Rejected");
                    if (job.verdict.failing_line && ! job.verdict.parse_error)
                        stream << " at line " << *job.verdict.failing_line;
                    stream << ": " << job.verdict.detail << "\n";
                }
            }
            if (as_json) {
                auto r = report("check");
                r["runs"] = std::move(runs);
                r["exit_code"] = code;
                out << r.dump(2) << "\n";
            }
            return code;
        }

        auto cmd_encode(const FamilyOptions & family, const string & output, bool as_json, ostream & out, ostream & err) -> int
        {
            auto instance = family.instance();
            auto formula = encode(instance);
            auto text = serialize_opb(formula);
            if (output.empty() || output == "-")
                out << text;
            else {
                std::ofstream file{output};
                if (! (file << text))
                    throw Error{"cannot write " + output};
            }
            auto vars = formula.num_variables();
            auto cons = formula.constraints.size();
            auto & summary = (output.empty() || output == "-") ? err : out;
            if (as_json) {
                auto r = report("encode");
                r["instance"] = describe(instance);
                r["variables"] = vars;
                r["constraints"] = cons;
                r["output"] = output;
                summary << r.dump(2) << "\n";
            }
            else
                summary << vars << " vars, " << cons << " constraints\n";
            return exit_code::ok;
        }

        auto valuation_literals(const Valuation & v, size_t n) -> string
        {
            string result;
            for (size_t x = 1; x <= n; ++x)
                result += (x > 1 ? " " : "") + to_string(v.get(static_cast<Variable>(x)) ? Literal::positive(x) : Literal::negative(x));
            return result;
        }

        auto cmd_oracle(const string & path, size_t limit, bool as_json, ostream & out) -> int
        {
            auto formula = read_opb_file(path);
            auto start = Clock::now();
            auto result = brute_force_sat(formula, limit);
            auto elapsed = millis_since(start);
            int code = result.status == OracleStatus::Sat ? exit_code::ok
                : result.status == OracleStatus::Unsat    ? exit_code::rejected
                                                          : exit_code::too_large;
            if (as_json) {
                auto r = report("oracle");
                r["inputs"] = {path};
                r["result"] = to_string(result.status);
                r["variables"] = result.variables;
                r["assignments"] = result.assignments;
                r["wall_ms"] = elapsed;
                r["witness"] = result.valuation ? json(valuation_literals(*result.valuation, result.variables)) : json(nullptr);
                r["exit_code"] = code;
                out << r.dump(2) << "\n";
            }
            else {
                out << to_string(result.status) << " (" << result.variables << " variables, " << result.assignments << " assignments)\n";
                if (result.valuation)
                    out << "v " << valuation_literals(*result.valuation, result.variables) << "\n";
            }
            return code;
        }

        auto cmd_witness(const FamilyOptions & family, const string & witness_text, bool as_json, ostream & out) -> int
        {
            auto instance = family.instance();
            auto witness = parse_witness(witness_text);
            bool valid = verify_witness(instance, witness);
            if (as_json) {
                auto r = report("witness");
                r["instance"] = describe(instance);
                r["witness"] = witness;
                r["result"] = valid ? "valid" : "invalid";
                out << r.dump(2) << "\n";
            }
            else
                out << describe(instance) << ": witness " << (valid ? "valid" : "invalid") << "\n";
            return valid ? exit_code::ok : exit_code::rejected;
        }

        struct ToolRun
        {
            int status = -1;
            string out, err;
        };

        auto slurp(const fs::path & path) -> string
        {
            std::ifstream in{path};
            std::stringstream buffer;
            buffer << in.rdbuf();
            return buffer.str();
        }

        /// Runs argv[0] with stdout and stderr captured through files in dir.
        auto run_tool(const vector<string> & argv, const fs::path & dir, const string & tag) -> ToolRun
        {
            auto out_path = dir / (tag + ".stdout"), err_path = dir / (tag + ".stderr");
            pid_t pid = fork();
            if (pid < 0)
                throw Error{"fork failed"};
            if (pid == 0) {
                int out_fd = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
                int err_fd = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
                if (out_fd < 0 || err_fd < 0)
                    _exit(127);
                dup2(out_fd, STDOUT_FILENO);
                dup2(err_fd, STDERR_FILENO);
                vector<char *> args;
                for (const auto & a : argv)
                    args.push_back(const_cast<char *>(a.c_str()));
                args.push_back(nullptr);
                execvp(args[0], args.data());
                _exit(127);
            }
            int wstatus = 0;
            waitpid(pid, &wstatus, 0);
            ToolRun run;
            run.status = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
            run.out = slurp(out_path);
            run.err = slurp(err_path);
            return run;
        }

        auto tool_available(const string & path) -> bool
        {
            return ! path.empty() && access(path.c_str(), X_OK) == 0;
        }

        /// Parses "v x1 -x2 ~x3 ..." lines into a valuation.
        auto parse_solver_values(const string & text) -> Valuation
        {
            Valuation v;
            std::stringstream lines{text};
            string line;
            while (std::getline(lines, line)) {
                if (line.rfind("v ", 0) != 0)
                    continue;
                std::stringstream words{line.substr(2)};
                string word;
                while (words >> word) {
                    bool negative = word[0] == '-' || word[0] == '~';
                    auto lit = parse_literal(Token{negative ? "~" + word.substr(1) : word, 0, 0});
                    v.set(lit.var(), ! lit.is_negative());
                }
            }
            return v;
        }

        auto solver_status(const string & text) -> string
        {
            std::stringstream lines{text};
            string line;
            while (std::getline(lines, line))
                if (line.rfind("s ", 0) == 0)
                    return line.substr(2);
            return "";
        }

        auto cmd_pipeline(const FamilyOptions & family, string solver, string elaborator, bool keep, bool as_json, ostream & out, ostream & err) -> int
        {
            if (solver.empty())
                if (const char * env = std::getenv("PBFORGE_SOLVER"))
                    solver = env;
            if (elaborator.empty())
                if (const char * env = std::getenv("PBFORGE_ELABORATOR"))
                    elaborator = env;

            auto instance = family.instance();
            auto r = report("pipeline");
            r["instance"] = describe(instance);
            auto finish = [&](int code, const string & result, const string & detail) {
                r["result"] = result;
                r["detail"] = detail;
                r["exit_code"] = code;
                if (as_json)
                    out << r.dump(2) << "\n";
                else
                    (code == exit_code::error ? err : out) << describe(instance) << ": " << result << (detail.empty() ? "" : " (" + detail + ")") << "\n";
                return code;
            };

            if (! tool_available(solver) || ! tool_available(elaborator))
                return finish(exit_code::skipped, "pipeline skipped", "set PBFORGE_SOLVER and PBFORGE_ELABORATOR to executable wrappers");

            auto dir = fs::temp_directory_path() / ("pbforge-" + std::to_string(getpid()) + "-" + std::to_string(Clock::now().time_since_epoch().count()));
            fs::create_directories(dir);
            auto opb = dir / "instance.opb", augmented = dir / "augmented.pbp", kernel = dir / "kernel.pbp";
            auto formula = encode(instance);
            std::ofstream{opb} << serialize_opb(formula);
            r["workdir"] = dir.string();
            r["variables"] = formula.num_variables();
            r["constraints"] = formula.constraints.size();

            auto cleanup = [&] {
                if (! keep) {
                    std::error_code ignored;
                    fs::remove_all(dir, ignored);
                }
            };

            auto solve = run_tool({solver, opb.string(), augmented.string()}, dir, "solver");
            auto status = solver_status(solve.out);
            r["solver_status"] = status;
            if (status.starts_with("SATISFIABLE") || status.starts_with("OPTIMUM")) {
                auto v = parse_solver_values(solve.out);
                bool ok = std::all_of(formula.constraints.begin(), formula.constraints.end(), [&](const Constraint & c) { return is_satisfied(v, c); });
                cleanup();
                if (! ok)
                    return finish(exit_code::rejected, "Rejected", "solver solution violates the formula");
                return finish(exit_code::ok, "VerifiedSat", "solver solution checked; witness " +
                        (verify_witness(instance, decode_witness(instance, v)) ? string{"valid"} : string{"invalid"}));
            }
            if (! status.starts_with("UNSATISFIABLE")) {
                cleanup();
                return finish(exit_code::error, "solver failed", "exit status " + std::to_string(solve.status) + ": " + solve.err);
            }

            auto elaborate = run_tool({elaborator, opb.string(), augmented.string(), kernel.string()}, dir, "elaborator");
            if (elaborate.status != 0) {
                cleanup();
                return finish(exit_code::error, "elaborator failed", "exit status " + std::to_string(elaborate.status) + ": " + elaborate.err);
            }

            std::ifstream in{kernel};
            ProofReader reader{in};
            auto start = Clock::now();
            auto verdict = check(formula, reader);
            r["wall_ms"] = millis_since(start);
            r["stats"] = stats_json(verdict.stats);
            cleanup();
            if (verdict.parse_error)
                return finish(exit_code::error, "parse error", verdict.detail);
            return finish(verdict.status == VerdictStatus::Rejected ? exit_code::rejected : exit_code::ok, to_string(verdict.status), verdict.detail);
        }
    }

    auto run_cli(const vector<string> & args, ostream & out, ostream & err) -> int
    {
        CLI::App app{"pseudo-Boolean proof checker and encoding toolkit", "pbforge"};
        app.require_subcommand(1);
        bool as_json = false;
        app.add_flag("--json", as_json, "machine-readable report");

        auto * check_cmd = app.add_subcommand("check", "check kernel proofs against OPB formulas");
        vector<string> check_files;
        CheckOptions check_options;
        check_cmd->add_option("files", check_files, "<opb> <proof> pairs")->required()->expected(2, -1);
        check_cmd->add_flag("--strict-hints", check_options.strict_hints, "rup uses only its hints");
        check_cmd->add_flag("--json", as_json, "machine-readable report");

        auto * encode_cmd = app.add_subcommand("encode", "write an OPB encoding of a problem instance");
        FamilyOptions encode_family;
        string encode_output;
        encode_family.add_to(*encode_cmd);
        encode_cmd->add_option("-o,--output", encode_output, "output file (default stdout)");
        encode_cmd->add_flag("--json", as_json, "machine-readable report");

        auto * oracle_cmd = app.add_subcommand("oracle", "decide a small OPB formula by exhaustive search");
        string oracle_path;
        size_t oracle_limit = 25;
        oracle_cmd->add_option("opb", oracle_path, "OPB file")->required();
        oracle_cmd->add_option("--limit", oracle_limit, "largest variable count to enumerate");
        oracle_cmd->add_flag("--json", as_json, "machine-readable report");

        auto * witness_cmd = app.add_subcommand("witness", "verify a native witness for a problem instance");
        FamilyOptions witness_family;
        string witness_text;
        witness_family.add_to(*witness_cmd);
        witness_cmd->add_option("witness", witness_text, "e.g. RRBBRRBB or 2,3,1,2,1,3")->required();
        witness_cmd->add_flag("--json", as_json, "machine-readable report");

        auto * pipeline_cmd = app.add_subcommand("pipeline", "encode, solve, elaborate and check");
        FamilyOptions pipeline_family;
        string solver, elaborator;
        bool keep = false;
        pipeline_family.add_to(*pipeline_cmd);
        pipeline_cmd->add_option("--solver", solver, "solver wrapper: <opb> <proof-out> (default $PBFORGE_SOLVER)");
        pipeline_cmd->add_option("--elaborator", elaborator, "elaborator wrapper: <opb> <proof> <kernel-out> (default $PBFORGE_ELABORATOR)");
        pipeline_cmd->add_flag("--keep", keep, "keep the working directory");
        pipeline_cmd->add_flag("--json", as_json, "machine-readable report");

        try {
            vector<string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp &) {
            out << app.help();
            return exit_code::ok;
        }
        catch (const CLI::ParseError & e) {
            err << e.what() << "\n";
            return exit_code::error;
        }

        try {
            if (*check_cmd)
                return cmd_check(check_files, check_options, as_json, out, err);
            if (*encode_cmd)
                return cmd_encode(encode_family, encode_output, as_json, out, err);
            if (*oracle_cmd)
                return cmd_oracle(oracle_path, oracle_limit, as_json, out);
            if (*witness_cmd)
                return cmd_witness(witness_family, witness_text, as_json, out);
            if (*pipeline_cmd)
                return cmd_pipeline(pipeline_family, solver, elaborator, keep, as_json, out, err);
        }
        catch (const std::exception & e) {
            err << "error: " << e.what() << "\n";
            return exit_code::error;
        }
        return exit_code::error;
    }

    auto run_cli(int argc, char ** argv, ostream & out, ostream & err) -> int
    {
        vector<string> args;
        for (int i = 1; i < argc; ++i)
            args.emplace_back(argv[i]);
        return run_cli(args, out, err);
    }
}
