// pdqsim: run a scenario file or sweep one parameter over several values and seeds.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pdq/metrics/report.hpp"
#include "pdq/scenario/runner.hpp"

namespace {

using namespace pdq;

enum Exit { ok = 0, usage = 1, invariant = 2, io = 3 };

int run_one(const std::string& scenario, std::optional<uint64_t> seed, const std::string& out,
            std::vector<std::string> sets)
{
    if (seed) sets.push_back("scenario.seed=" + std::to_string(*seed));
    scenario::ScenarioConfig cfg;
    try {
        cfg = scenario::load_config(scenario, sets);
    } catch (const scenario::ConfigError& e) {
        std::cerr << "pdqsim: " << e.what() << '\n';
        return usage;
    }
    try {
        metrics::MetricsReport report;
        const auto bad = scenario::run_to_directory(cfg, out, &report);
        metrics::write_summary(report, std::cout);
        for (const auto& b : bad) std::cerr << "invariant violated: " << b << '\n';
        return bad.empty() ? ok : invariant;
    } catch (const metrics::IoError& e) {
        std::cerr << "pdqsim: " << e.what() << '\n';
        return io;
    } catch (const std::exception& e) {
        std::cerr << "pdqsim: " << e.what() << '\n';
        return invariant;
    }
}

struct Point {
    std::string value;
    uint64_t seed = 0;
    std::filesystem::path dir;
    std::optional<metrics::Summary> summary;
    std::string error;
    bool invariant_failed = false;
};

std::string opt(const std::optional<double>& v) { return v ? metrics::format_double(*v) : "na"; }

int run_sweep(const std::string& scenario, uint64_t base_seed, uint32_t seeds, const std::string& out,
              const std::vector<std::string>& sets, const std::string& sweep, unsigned jobs)
{
    const auto eq = sweep.find('=');
    if (eq == std::string::npos || eq + 1 >= sweep.size()) {
        std::cerr << "pdqsim: --sweep expects key=v1,v2,...\n";
        return usage;
    }
    const std::string key = sweep.substr(0, eq);
    std::vector<std::string> values;
    std::stringstream ss(sweep.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');)
        if (!v.empty()) values.push_back(v);
    if (values.empty()) {
        std::cerr << "pdqsim: --sweep needs at least one value\n";
        return usage;
    }

    // validate every point before spending time on any of them
    std::vector<Point> points;
    std::vector<scenario::ScenarioConfig> cfgs;
    for (const auto& v : values) {
        for (uint32_t s = 0; s < seeds; ++s) {
            auto all = sets;
            all.push_back(key + "=" + v);
            all.push_back("scenario.seed=" + std::to_string(base_seed + s));
            try {
                cfgs.push_back(scenario::load_config(scenario, all));
            } catch (const scenario::ConfigError& e) {
                std::cerr << "pdqsim: " << e.what() << '\n';
                return usage;
            }
            Point p;
            p.value = v;
            p.seed = base_seed + s;
            p.dir = std::filesystem::path(out) / (key + "=" + v) / ("seed" + std::to_string(p.seed));
            points.push_back(std::move(p));
        }
    }

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < points.size();) {
            auto& p = points[i];
            try {
                metrics::MetricsReport r;
                const auto bad = scenario::run_to_directory(cfgs[i], p.dir, &r);
                p.summary = r.summary();
                p.invariant_failed = !bad.empty();
                if (!bad.empty()) p.error = bad.front();
            } catch (const std::exception& e) {
                p.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    const auto table = std::filesystem::path(out) / "sweep.csv";
    std::ofstream os(table, std::ios::binary);
    if (!os) {
        std::cerr << "pdqsim: cannot open " << table.string() << " for writing\n";
        return io;
    }
    os << "point,seed,flows,completed,mean_fct_ms,median_fct_ms,p99_fct_ms,application_throughput,drops,probes,status\n";
    bool any_invariant = false, any_error = false;
    for (const auto& v : values) {
        double mean = 0, med = 0, p99 = 0, app = 0;
        size_t n = 0, n_app = 0;
        for (const auto& p : points) {
            if (p.value != v) continue;
            if (!p.summary) {
                any_error = true;
                os << key << '=' << v << ',' << p.seed << ",,,,,,,,,error: " << p.error << '\n';
                std::cerr << "pdqsim: point " << v << " seed " << p.seed << ": " << p.error << '\n';
                continue;
            }
            const auto& s = *p.summary;
            any_invariant |= p.invariant_failed;
            os << key << '=' << v << ',' << p.seed << ',' << s.flows << ',' << s.completed << ','
               << metrics::format_double(s.mean_fct_ms) << ',' << metrics::format_double(s.median_fct_ms) << ','
               << metrics::format_double(s.p99_fct_ms) << ',' << opt(s.application_throughput) << ',' << s.drops
               << ',' << s.probes << ',' << (p.invariant_failed ? "invariant: " + p.error : std::string("ok")) << '\n';
            ++n;
            mean += s.mean_fct_ms;
            med += s.median_fct_ms;
            p99 += s.p99_fct_ms;
            if (s.application_throughput) {
                app += *s.application_throughput;
                ++n_app;
            }
        }
        if (n) {
            const double k = static_cast<double>(n);
            os << key << '=' << v << ",mean,,," << metrics::format_double(mean / k) << ','
               << metrics::format_double(med / k) << ',' << metrics::format_double(p99 / k) << ','
               << (n_app ? metrics::format_double(app / static_cast<double>(n_app)) : std::string("na")) << ",,,\n";
        }
    }
    os.close();
    std::ifstream back(table);
    std::cout << back.rdbuf();
    if (any_invariant) return invariant;
    return any_error ? invariant : ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Packet-level simulator for preemptive distributed flow scheduling"};
    app.require_subcommand(1);

    std::string scenario, out = "out";
    std::optional<uint64_t> seed;
    std::vector<std::string> sets;

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("--scenario", scenario, "Scenario config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override scenario.seed");
    run->add_option("--out", out, "Output directory")->capture_default_str();
    run->add_option("--set", sets, "Override a key: section.key=value (repeatable)");

    std::string sweep;
    uint32_t seeds = 1;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sw = app.add_subcommand("sweep", "Run a scenario over a list of values for one key");
    sw->add_option("--scenario", scenario, "Scenario config file")->required()->check(CLI::ExistingFile);
    sw->add_option("--sweep", sweep, "section.key=v1,v2,...")->required();
    sw->add_option("--seeds", seeds, "Seeds per point, counting up from --seed")->check(CLI::PositiveNumber);
    sw->add_option("--seed", seed, "First seed");
    sw->add_option("--out", out, "Output directory")->capture_default_str();
    sw->add_option("--set", sets, "Override a key: section.key=value (repeatable)");
    sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    if (*run) return run_one(scenario, seed, out, sets);
    return run_sweep(scenario, seed.value_or(1), seeds, out, sets, sweep, jobs);
}
