// Command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 numeric/domain failure,
// 3 validation failure (mc-validate status "fail").

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rischarge/commands.hpp"

namespace {

using namespace rischarge;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "a,b,c" or "lo:step:hi"
std::vector<double> parse_values(const std::string& s) {
    std::vector<double> v;
    const auto parts = split(s, ':');
    if (parts.size() == 3 && s.find(',') == std::string::npos) {
        const double lo = std::stod(parts[0]), step = std::stod(parts[1]), hi = std::stod(parts[2]);
        if (!(step > 0.0) || hi < lo) throw ConfigError("range must be lo:step:hi with step > 0");
        for (int i = 0; lo + i * step <= hi + 1e-9 * step; ++i) v.push_back(lo + i * step);
        return v;
    }
    for (const auto& p : split(s, ',')) {
        try {
            v.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw ConfigError("bad sweep value '" + p + "'");
        }
    }
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Common {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key = value configuration file");
        for (const auto& key : config::keys()) {
            cmd->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { overrides[key] = v; },
                "override config key " + key);
        }
    }

    config::RunConfig build() const {
        config::RunConfig c;
        if (!config_path.empty()) c = config::parse(read_file(config_path));
        for (const auto& [k, v] : overrides) config::set(c, k, v);
        return c;
    }
};

void write_or_print(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
    } else {
        output::write_text(path, text);
        std::cerr << "wrote " << path << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Battery recharging time statistics for RIS-assisted wireless power transfer"};
    app.require_subcommand(1);

    Common common_pdf, common_cdf, common_sweep, common_mc, common_fig;
    std::string target = "brt", variants = "exact";
    std::string axis, values;
    int figure = 0;

    auto* pdf = app.add_subcommand("pdf", "tabulate probability densities on the grid");
    auto* cdf = app.add_subcommand("cdf", "tabulate cumulative distributions on the grid");
    for (auto [cmd, common] : {std::pair{pdf, &common_pdf}, std::pair{cdf, &common_cdf}}) {
        common->attach(cmd);
        cmd->add_option("--target", target, "gain | power | brt")->capture_default_str();
        cmd->add_option("--variants", variants, "comma list of exact, n1, clt, empirical")->capture_default_str();
    }
    auto* sweep = app.add_subcommand("sweep", "BRT summary statistics along one parameter axis");
    common_sweep.attach(sweep);
    sweep->add_option("--axis", axis, "n | ps_dbm | d1_frac | cb_mah")->required();
    sweep->add_option("--values", values, "comma list or lo:step:hi")->required();
    auto* mc = app.add_subcommand("mc-validate", "compare analytic laws with a Monte Carlo run (JSON report)");
    common_mc.attach(mc);
    auto* fig = app.add_subcommand("fig", "reproduce a figure preset (CSV files into the --out directory)");
    common_fig.attach(fig);
    fig->add_option("number", figure, "figure number 1..7")->required()->check(CLI::Range(1, 7));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pdf->parsed() || cdf->parsed()) {
            const bool cumulative = cdf->parsed();
            const auto c = (cumulative ? common_cdf : common_pdf).build();
            std::vector<cli::Variant> vs;
            for (const auto& s : split(variants, ',')) vs.push_back(cli::parse_variant(s));
            const auto table = cli::distribution_table(c, cli::parse_target(target), vs, cumulative);
            write_or_print(c.out, table.to_csv(c.precision));
        } else if (sweep->parsed()) {
            const auto c = common_sweep.build();
            c.validate();
            std::vector<std::string> errors;
            const auto table = cli::sweep_table(c, cli::parse_axis(axis), parse_values(values), &errors);
            write_or_print(c.out, table.to_csv(c.precision));
            for (const auto& e : errors) std::cerr << "row error: " << e << "\n";
        } else if (mc->parsed()) {
            const auto c = common_mc.build();
            const auto report = cli::mc_validate(c);
            write_or_print(common_mc.overrides.count("out") ? c.out : "-", report.dump(2) + "\n");
            if (report["status"] == "fail") return 3;
        } else if (fig->parsed()) {
            auto c = common_fig.build();
            c.validate();
            const std::string dir = common_fig.overrides.count("out") ? c.out : "figures";
            std::vector<std::string> errors;
            for (const auto& path : cli::run_figure(figure, c, dir, &errors)) std::cerr << "wrote " << path << "\n";
            for (const auto& e : errors) std::cerr << "row error: " << e << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
