// Generates proofs for tests and benchmarks: DPLL refutations of OPB files, and the
// synthetic long proofs used by the memory test.

#include <generators.hh>

#include <pbforge/opb.hh>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace pbforge;

auto main(int argc, char * argv[]) -> int
{
    CLI::App app{"proof generators", "pbforge-gen"};
    app.require_subcommand(1);

    auto * dpll = app.add_subcommand("dpll", "write a DPLL-derived kernel proof for an OPB file");
    std::string opb_path, output;
    dpll->add_option("opb", opb_path)->required();
    dpll->add_option("-o,--output", output)->required();

    auto * scale = app.add_subcommand("scale", "write a long synthetic pol/rup/del proof and its formula");
    std::size_t steps = 50'000, width = 50;
    bool keep_all = false;
    std::string prefix;
    scale->add_option("--steps", steps);
    scale->add_option("--width", width);
    scale->add_flag("--no-deletions", keep_all);
    scale->add_option("prefix", prefix, "writes <prefix>.opb and <prefix>.pbp")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dpll) {
            auto formula = read_opb_file(opb_path);
            auto proof = testing::dpll_proof(formula);
            std::ofstream{output} << proof.text;
            std::cout << (proof.unsat ? "UNSAT" : "SAT") << ", " << proof.steps << " steps\n";
        }
        else {
            auto c = testing::scalability_case(steps, width, ! keep_all);
            std::ofstream{prefix + ".opb"} << serialize_opb(c.formula);
            std::ofstream{prefix + ".pbp"} << c.proof;
            std::cout << c.steps << " steps\n";
        }
    }
    catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
