#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "motint/dsl.hpp"

namespace {

/// Parse `--oracle q=2,3 p=3,5 depth=6 box=40` key=value entries.
bool apply_oracle_opt(const std::vector<std::string>& kvs, motint::OracleConfig& cfg,
                      std::string& err) {
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            err = "oracle option '" + kv + "' is not key=value";
            return false;
        }
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        std::vector<std::string> parts;
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        try {
            if (key == "q") {
                cfg.qs.clear();
                for (const auto& s : parts) {
                    auto slash = s.find('/');
                    if (slash == std::string::npos)
                        cfg.qs.emplace_back(std::stol(s));
                    else
                        cfg.qs.emplace_back(std::stol(s.substr(0, slash)),
                                            std::stol(s.substr(slash + 1)));
                }
            } else if (key == "p") {
                cfg.primes.clear();
                for (const auto& s : parts) cfg.primes.push_back(std::stol(s));
            } else if (key == "depth") {
                cfg.depth = std::stol(val);
            } else if (key == "box") {
                cfg.box = std::stol(val);
            } else {
                err = "unknown oracle key '" + key + "' (expected q, p, depth, box)";
                return false;
            }
        } catch (const std::exception&) {
            err = "bad oracle value in '" + kv + "'";
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motint: symbolic engine for motivic measures and Presburger sums"};
    app.require_subcommand(1);

    std::string script_path, out_path;
    std::vector<std::string> oracle_kvs;
    bool oracle_on = false;
    unsigned long seed = 0;

    auto* run = app.add_subcommand("run", "execute a script file");
    run->add_option("file", script_path, "script to execute")->required();
    run->add_option("--out", out_path, "write machine-readable results to this JSON file");
    run->add_option("--oracle", oracle_kvs,
                    "enable numeric cross-checks; key=value settings q=, p=, depth=, box=")
        ->expected(0, -1)
        ->trigger_on_parse();
    run->add_option("--seed", seed, "seed for randomized verification");

    auto* repl = app.add_subcommand("repl", "interactive statement loop");
    repl->add_option("--oracle", oracle_kvs, "enable numeric cross-checks")
        ->expected(0, -1)
        ->trigger_on_parse();

    CLI11_PARSE(app, argc, argv);

    motint::RunFlags flags;
    flags.seed = seed;
    if (run->count("--oracle") || repl->count("--oracle")) oracle_on = true;
    flags.oracle = oracle_on;
    std::string err;
    if (!apply_oracle_opt(oracle_kvs, flags.cfg, err)) {
        std::cerr << "error: " << err << "\n";
        return 2;
    }

    if (repl->parsed()) return motint::repl_loop(std::cin, std::cout, flags);

    std::ifstream in(script_path);
    if (!in) {
        std::cerr << "error: cannot open '" << script_path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    motint::RunResult result = motint::run_text(buf.str(), flags);
    std::cout << result.output;
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return 2;
        }
        out << result.json << "\n";
    }
    return result.exit_code;
}
