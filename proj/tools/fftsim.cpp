#include "CLI11.hpp"
#include "fftsim/experiment.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"round-based simulator for fault-tolerant distributed transforms"};
    app.require_subcommand(1);

    std::string config_path, faults_path, out_path;
    std::vector<std::string> settings;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", settings, "override a config key, e.g. --set k=8")->take_all();
    app.add_option("--out", out_path, "write CSV rows here");

    CLI::App* bounds = app.add_subcommand("bounds", "print analytic cost bounds");
    CLI::App* run = app.add_subcommand("run", "one protected + one plain run");
    run->add_option("--faults", faults_path, "fault scenario file (stage,node,kind[,delay])");
    CLI::App* sweep = app.add_subcommand("sweep", "fault-free parameter grid");
    for (CLI::App* sub : {bounds, run, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        fftsim::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = fftsim::parse_config(read_file(config_path));
        for (const auto& s : settings) fftsim::apply_setting(cfg, s);

        std::ofstream csv_file;
        std::ostream* csv = nullptr;
        if (!out_path.empty()) {
            csv_file.open(out_path);
            if (!csv_file) throw std::runtime_error("cannot write " + out_path);
            csv = &csv_file;
        }

        if (bounds->parsed()) return fftsim::cmd_bounds(cfg, std::cout);
        if (run->parsed()) {
            std::vector<fftsim::FaultEvent> faults;
            if (!faults_path.empty())
                faults = fftsim::parse_fault_scenario(read_file(faults_path));
            return fftsim::cmd_run(cfg, faults, std::cout, csv);
        }
        if (sweep->parsed()) return fftsim::cmd_sweep(cfg, std::cout, csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
