// Copyright (c) 2026 The proofchannels developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// Command line front end for the scenario runner.
//
//   proofchannels run <scenario> [--seed N] [--out FILE] [--log-level L]
//   proofchannels list
//   proofchannels check <scenario>
//
// <scenario> is either a builtin name (optionally written builtin:<name>)
// or a path to a scenario file. Exit codes: 0 the scenario ran and every
// invariant check passed, 1 an invariant check failed, 2 the scenario could
// not be parsed or validated.

#include <CLI11.hpp>

#include <proofchannels/scenario.hpp>

#include <fstream>
#include <iostream>

namespace {

pfc::Scenario load_scenario(const std::string& arg) {
    std::string name = arg;
    bool builtin_only = false;
    if (name.rfind("builtin:", 0) == 0) {
        name = name.substr(8);
        builtin_only = true;
    }
    if (const pfc::BuiltinScenario* b = pfc::find_builtin(name))
        return pfc::parse_scenario(b->text);
    if (builtin_only) throw pfc::ScenarioError("unknown builtin scenario '" + name + "'");

    std::ifstream in(arg, std::ios::binary);
    if (!in)
        throw pfc::ScenarioError("'" + arg + "' is neither a builtin scenario nor a readable file");
    std::ostringstream os;
    os << in.rdbuf();
    pfc::Scenario sc = pfc::parse_scenario(os.str());
    pfc::validate_scenario(sc);
    return sc;
}

//! Event kind of a harness log line ("step=3 height=2 actor=a event=send ...").
std::string event_kind(const std::string& line) {
    std::size_t at = line.find("event=");
    if (at == std::string::npos) return "";
    std::size_t end = line.find(' ', at);
    return line.substr(at + 6, end == std::string::npos ? std::string::npos : end - at - 6);
}

//! info hides the per-message and per-block noise; debug shows everything.
bool shown_at(const std::string& level, const std::string& kind) {
    if (level == "quiet") return false;
    if (level == "debug") return true;
    return kind != "send" && kind != "recv" && kind != "block";
}

int cmd_run(const std::string& scenario_arg, std::optional<std::uint64_t> seed,
            const std::string& out_file, const std::string& log_level) {
    pfc::Scenario sc = load_scenario(scenario_arg);
    pfc::Report report = pfc::run_scenario(sc, seed);

    for (const std::string& line : report.event_log)
        if (shown_at(log_level, event_kind(line))) std::cout << line << "\n";
    std::cout << report.render();

    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write '" << out_file << "'\n";
            return 2;
        }
        for (const std::string& line : report.event_log) out << line << "\n";
    }
    return report.pass() ? 0 : 1;
}

int cmd_list() {
    std::size_t width = 0;
    for (const pfc::BuiltinScenario& b : pfc::builtin_scenarios())
        width = std::max(width, std::string(b.name).size());
    for (const pfc::BuiltinScenario& b : pfc::builtin_scenarios())
        std::cout << std::left << std::setw(static_cast<int>(width + 2)) << b.name << b.summary
                  << "\n";
    return 0;
}

int cmd_check(const std::string& scenario_arg) {
    pfc::Scenario sc = load_scenario(scenario_arg);
    pfc::validate_scenario(sc);
    std::cout << "ok scenario=" << sc.name << " actors=" << sc.actors.size()
              << " channels=" << sc.channels.size() << " directives=" << sc.script.size()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"payment channels with proof bets: protocol engine and simulator"};
    app.require_subcommand(1);

    std::string scenario_arg, out_file, log_level = "info";
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "run a scenario and print its report");
    run->add_option("scenario", scenario_arg, "builtin name or scenario file")->required();
    run->add_option("--seed", seed, "override the scenario's random seed");
    run->add_option("--out", out_file, "write the full event log to a file");
    run->add_option("--log-level", log_level, "quiet, info or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));

    CLI::App* list = app.add_subcommand("list", "list the builtin scenarios");

    CLI::App* check = app.add_subcommand("check", "parse and validate a scenario");
    check->add_option("scenario", scenario_arg, "builtin name or scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(scenario_arg, seed, out_file, log_level);
        if (list->parsed()) return cmd_list();
        if (check->parsed()) return cmd_check(scenario_arg);
    } catch (const pfc::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
