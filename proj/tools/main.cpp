// tvbarc command line: ingest keyword records to daily counts, fit the
// time-varying autoregressive Poisson model, and run the classical
// changepoint/ACF diagnostics. Every command stages its outputs in a
// temporary directory and renames on success, so a failing run leaves the
// output directory untouched.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvbarc/tvbarc.hpp"

namespace fs = std::filesystem;

namespace {

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("TVBARC_OUT_DIR"); env && *env) return env;
    return ".";
}

tvbarc::Date parse_date_flag(const std::string& value, const std::string& flag) {
    auto d = tvbarc::parse_date(value);
    if (!d) throw CLI::ValidationError(flag, "expected an ISO date (YYYY-MM-DD)");
    return *d;
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct IngestOptions {
    std::string records_path;
    std::string classmap_path;
    std::string start;
    std::string end;
    std::string out_dir;
};

int run_ingest(const IngestOptions& opt) {
    Stopwatch timer;
    tvbarc::Date start = parse_date_flag(opt.start, "--start");
    tvbarc::Date end = parse_date_flag(opt.end, "--end");
    if (end < start) throw CLI::ValidationError("--end", "range end precedes start");

    tvbarc::KeywordClassMap classes = opt.classmap_path.empty()
                                          ? tvbarc::default_class_map()
                                          : tvbarc::read_class_map(opt.classmap_path);
    tvbarc::RecordReadResult records = tvbarc::read_records(opt.records_path);
    tvbarc::AggregateResult agg = tvbarc::aggregate_daily(records.records, start, end, classes);

    tvbarc::RunManifest manifest;
    manifest.command = "ingest";
    manifest.inputs.push_back(opt.records_path);
    if (!opt.classmap_path.empty()) manifest.inputs.push_back(opt.classmap_path);
    manifest.config["start"] = opt.start;
    manifest.config["end"] = opt.end;
    manifest.config["classmap"] = opt.classmap_path.empty() ? "built-in" : opt.classmap_path;
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (const auto& cls : classes.classes) labels.push_back(cls.first);
    manifest.config["classes"] = std::move(labels);
    if (records.records.empty()) manifest.warnings.push_back("no usable records; all counts are zero");
    if (records.malformed > 0)
        manifest.warnings.push_back(std::to_string(records.malformed) + " malformed records dropped");
    if (agg.duplicate_ids > 0)
        manifest.warnings.push_back(std::to_string(agg.duplicate_ids) + " duplicate ids dropped");
    if (agg.out_of_range > 0)
        manifest.warnings.push_back(std::to_string(agg.out_of_range) + " records outside range dropped");

    tvbarc::OutputStager stager(resolve_out_dir(opt.out_dir));
    for (const auto& [label, series] : agg.series) {
        std::string name = label + ".csv";
        tvbarc::write_counts_csv(series, stager.stage(name));
        manifest.outputs.push_back(name);
    }
    manifest.duration_seconds = timer.seconds();
    tvbarc::write_manifest(manifest, stager.stage("manifest.json"));
    stager.commit();
    std::cout << "wrote " << manifest.outputs.size() << " series to "
              << stager.target_dir().string() << '\n';
    return 0;
}

struct FitOptions {
    std::string counts_path;
    int p = 1;
    int k1 = 6;
    int k2 = 6;
    double c1 = 100.0;
    double c2 = 100.0;
    std::int64_t burnin = 10000;
    std::int64_t samples = 20000;
    std::int64_t thin = 1;
    std::uint64_t seed = 0;
    double level = 0.95;
    int chains = 1;
    int grid_points = 100;
    double initial_step = 0.1;
    double target_accept = 0.44;
    tvbarc::ProposalKind proposal = tvbarc::ProposalKind::random_walk;
    bool trend_json = false;
    std::string out_dir;
};

int run_fit(const FitOptions& opt) {
    Stopwatch timer;
    tvbarc::CountSeries series = tvbarc::read_counts_csv(opt.counts_path);
    tvbarc::ModelSpec spec = tvbarc::make_model_spec(opt.p, opt.k1, opt.k2, 3, opt.c1, opt.c2);

    tvbarc::SamplerConfig base;
    base.burn_in = opt.burnin;
    base.retained = opt.samples;
    base.thin = opt.thin;
    base.seed = opt.seed;
    base.proposal = opt.proposal;
    base.initial_step = opt.initial_step;
    base.target_accept = opt.target_accept;

    std::vector<std::future<tvbarc::PosteriorChain>> futures;
    futures.reserve(static_cast<std::size_t>(opt.chains));
    for (int k = 0; k < opt.chains; ++k) {
        tvbarc::SamplerConfig cfg = base;
        cfg.seed = opt.seed + static_cast<std::uint64_t>(k);
        futures.push_back(std::async(std::launch::async, [&series, &spec, cfg] {
            return tvbarc::run_chain(series, spec, cfg);
        }));
    }
    std::vector<tvbarc::PosteriorChain> chains;
    chains.reserve(futures.size());
    for (auto& f : futures) chains.push_back(f.get());

    // Trend summaries pool the draws of all chains in chain-index order.
    tvbarc::PosteriorChain pooled = chains.front();
    for (std::size_t k = 1; k < chains.size(); ++k) {
        pooled.draws.insert(pooled.draws.end(), chains[k].draws.begin(), chains[k].draws.end());
        pooled.log_posterior_trace.insert(pooled.log_posterior_trace.end(),
                                          chains[k].log_posterior_trace.begin(),
                                          chains[k].log_posterior_trace.end());
    }
    std::vector<double> grid = tvbarc::make_grid(opt.grid_points);
    std::vector<tvbarc::TrendSummary> summaries;
    summaries.push_back(tvbarc::trend_summary(pooled, tvbarc::TrendTarget::mu(), grid, opt.level));
    for (int i = 1; i <= opt.p; ++i)
        summaries.push_back(
            tvbarc::trend_summary(pooled, tvbarc::TrendTarget::ar(i), grid, opt.level));

    tvbarc::RunManifest manifest;
    manifest.command = "fit";
    manifest.inputs.push_back(opt.counts_path);
    manifest.seed = opt.seed;
    manifest.seeded = true;
    manifest.config["model"] = {{"p", spec.p},       {"k1", spec.k1()}, {"k2", spec.k2()},
                                {"degree", spec.basis_mu.degree}, {"c1", spec.c1}, {"c2", spec.c2}};
    manifest.config["sampler"] = {{"burn_in", base.burn_in},
                                  {"retained", base.retained},
                                  {"thin", base.thin},
                                  {"seed", base.seed},
                                  {"proposal", tvbarc::to_string(base.proposal)},
                                  {"initial_step", base.initial_step},
                                  {"target_accept", base.target_accept}};
    manifest.config["level"] = opt.level;
    manifest.config["chains"] = opt.chains;
    manifest.config["grid_points"] = opt.grid_points;

    tvbarc::OutputStager stager(resolve_out_dir(opt.out_dir));
    auto stage_file = [&](const std::string& name) {
        manifest.outputs.push_back(name);
        return stager.stage(name);
    };
    if (opt.chains == 1) {
        tvbarc::write_chain_csv(chains[0], stage_file("chain.csv"));
        tvbarc::write_chain_metadata(chains[0], stage_file("chain_meta.json"));
    } else {
        for (std::size_t k = 0; k < chains.size(); ++k) {
            std::string suffix = "_" + std::to_string(k + 1);
            tvbarc::write_chain_csv(chains[k], stage_file("chain" + suffix + ".csv"));
            tvbarc::write_chain_metadata(chains[k], stage_file("chain_meta" + suffix + ".json"));
        }
    }
    for (const tvbarc::TrendSummary& s : summaries) {
        std::string base_name = "trend_" + s.target;
        tvbarc::write_trend_csv(s, stage_file(base_name + ".csv"));
        if (opt.trend_json) tvbarc::write_trend_json(s, stage_file(base_name + ".json"));
    }
    manifest.duration_seconds = timer.seconds();
    tvbarc::write_manifest(manifest, stager.stage("manifest.json"));
    stager.commit();

    std::cout << "fit " << series.label << " (T=" << series.length() << ", p=" << spec.p
              << "): " << pooled.draws.size() << " draws";
    for (const tvbarc::BlockStats& b : chains[0].block_stats)
        std::cout << ", accept[" << b.name << "]=" << b.acceptance_rate;
    std::cout << '\n';
    return 0;
}

struct ChangepointOptions {
    std::string counts_path;
    std::int64_t min_segment = 2;
    std::string out_dir;
};

int run_changepoint(const ChangepointOptions& opt) {
    Stopwatch timer;
    tvbarc::CountSeries series = tvbarc::read_counts_csv(opt.counts_path);
    tvbarc::ChangePointResult result = tvbarc::detect_changepoint(series, opt.min_segment);

    tvbarc::RunManifest manifest;
    manifest.command = "changepoint";
    manifest.inputs.push_back(opt.counts_path);
    manifest.config["min_segment"] = opt.min_segment;
    manifest.outputs.push_back("changepoint.json");

    tvbarc::OutputStager stager(resolve_out_dir(opt.out_dir));
    tvbarc::write_changepoint_json(result, series, stager.stage("changepoint.json"));
    manifest.duration_seconds = timer.seconds();
    tvbarc::write_manifest(manifest, stager.stage("manifest.json"));
    stager.commit();
    std::cout << "changepoint at t=" << result.tau_hat << " ("
              << tvbarc::format_date(series.date_at(result.tau_hat)) << "), mean "
              << result.base_mean << " -> " << (result.base_mean + result.shift) << '\n';
    return 0;
}

struct AcfOptions {
    std::string counts_path;
    std::int64_t max_lag = 30;
    std::string out_dir;
};

int run_acf(const AcfOptions& opt) {
    Stopwatch timer;
    tvbarc::CountSeries series = tvbarc::read_counts_csv(opt.counts_path);
    std::vector<double> acf = tvbarc::sample_acf(series, opt.max_lag);

    tvbarc::RunManifest manifest;
    manifest.command = "acf";
    manifest.inputs.push_back(opt.counts_path);
    manifest.config["max_lag"] = opt.max_lag;
    manifest.outputs.push_back("acf.csv");

    tvbarc::OutputStager stager(resolve_out_dir(opt.out_dir));
    tvbarc::write_acf_csv(acf, stager.stage("acf.csv"));
    manifest.duration_seconds = timer.seconds();
    tvbarc::write_manifest(manifest, stager.stage("manifest.json"));
    stager.commit();
    std::cout << "acf up to lag " << opt.max_lag << " written\n";
    return 0;
}

struct SimulateOptions {
    std::string genspec_path;
    std::string out_dir;
};

int run_simulate(const SimulateOptions& opt) {
    Stopwatch timer;
    std::ifstream in(opt.genspec_path);
    if (!in) throw tvbarc::data_error("cannot open file: " + opt.genspec_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw tvbarc::data_error(opt.genspec_path + ": invalid JSON: " + std::string(e.what()));
    }
    tvbarc::GeneratorSpec spec = tvbarc::generator_from_json(j);
    tvbarc::CountSeries series = tvbarc::simulate(spec);

    tvbarc::RunManifest manifest;
    manifest.command = "simulate";
    manifest.inputs.push_back(opt.genspec_path);
    manifest.seed = spec.seed;
    manifest.seeded = true;
    manifest.config["generator"] = tvbarc::generator_to_json(spec);
    std::string name = series.label + ".csv";
    manifest.outputs.push_back(name);

    tvbarc::OutputStager stager(resolve_out_dir(opt.out_dir));
    tvbarc::write_counts_csv(series, stager.stage(name));
    manifest.duration_seconds = timer.seconds();
    tvbarc::write_manifest(manifest, stager.stage("manifest.json"));
    stager.commit();
    std::cout << "simulated " << series.length() << " days into " << name << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying Bayesian autoregressive modeling of daily count series"};
    app.set_version_flag("--version", std::string(tvbarc::version));
    app.require_subcommand(1);

    IngestOptions ingest;
    CLI::App* cmd_ingest = app.add_subcommand(
        "ingest", "Aggregate timestamped keyword records into daily count CSVs per class");
    cmd_ingest->add_option("records", ingest.records_path, "CSV (id,timestamp,keyword) or JSON-lines file")
        ->required();
    cmd_ingest->add_option("--classmap", ingest.classmap_path,
                           "JSON {label: [keywords...]}; defaults to the built-in map");
    cmd_ingest->add_option("--start", ingest.start, "first day (YYYY-MM-DD)")->required();
    cmd_ingest->add_option("--end", ingest.end, "last day (YYYY-MM-DD)")->required();
    cmd_ingest->add_option("-o,--out", ingest.out_dir, "output directory (default $TVBARC_OUT_DIR or .)");

    FitOptions fit;
    CLI::App* cmd_fit =
        app.add_subcommand("fit", "Sample the posterior of the time-varying Poisson AR model");
    cmd_fit->add_option("counts", fit.counts_path, "date,count CSV")->required();
    cmd_fit->add_option("--p", fit.p, "autoregressive order")->check(CLI::PositiveNumber);
    cmd_fit->add_option("--k1", fit.k1, "basis size for the trend")->check(CLI::PositiveNumber);
    cmd_fit->add_option("--k2", fit.k2, "basis size for the lag coefficients")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--c1", fit.c1, "prior variance of the mixture weights")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--c2", fit.c2, "prior variance of the trend coefficients")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--burnin", fit.burnin, "discarded iterations")
        ->check(CLI::NonNegativeNumber);
    cmd_fit->add_option("--samples", fit.samples, "retained iterations")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--thin", fit.thin, "keep every k-th retained draw")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--seed", fit.seed, "RNG seed (chain k uses seed+k-1)");
    cmd_fit->add_option("--level", fit.level, "credible level for the trend bands")
        ->check(CLI::Range(0.0, 1.0).description("(0..1)"));
    cmd_fit->add_option("--chains", fit.chains, "independent chains run concurrently")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--grid", fit.grid_points, "trend summary grid points")
        ->check(CLI::Range(2, 100000));
    cmd_fit->add_option("--initial-step", fit.initial_step, "starting proposal scale")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_option("--target-accept", fit.target_accept, "adaptation target rate")
        ->check(CLI::Range(0.0, 1.0).description("(0..1)"));
    std::map<std::string, tvbarc::ProposalKind> proposal_names{
        {"random-walk", tvbarc::ProposalKind::random_walk},
        {"gradient-informed", tvbarc::ProposalKind::gradient_informed}};
    cmd_fit->add_option("--proposal", fit.proposal, "proposal kernel")
        ->transform(CLI::CheckedTransformer(proposal_names, CLI::ignore_case));
    cmd_fit->add_flag("--trend-json", fit.trend_json, "also write trend summaries as JSON");
    cmd_fit->add_option("-o,--out", fit.out_dir, "output directory (default $TVBARC_OUT_DIR or .)");

    ChangepointOptions cp;
    CLI::App* cmd_cp = app.add_subcommand("changepoint",
                                          "Locate a single abrupt mean shift by least squares");
    cmd_cp->add_option("counts", cp.counts_path, "date,count CSV")->required();
    cmd_cp->add_option("--min-segment", cp.min_segment, "minimum days on each side")
        ->check(CLI::PositiveNumber);
    cmd_cp->add_option("-o,--out", cp.out_dir, "output directory (default $TVBARC_OUT_DIR or .)");

    AcfOptions acf;
    CLI::App* cmd_acf = app.add_subcommand("acf", "Sample autocorrelation of a daily count series");
    cmd_acf->add_option("counts", acf.counts_path, "date,count CSV")->required();
    cmd_acf->add_option("--max-lag", acf.max_lag, "largest lag reported")
        ->check(CLI::PositiveNumber);
    cmd_acf->add_option("-o,--out", acf.out_dir, "output directory (default $TVBARC_OUT_DIR or .)");

    SimulateOptions sim;
    CLI::App* cmd_sim = app.add_subcommand(
        "simulate", "Draw a synthetic count series from a generator spec JSON");
    cmd_sim->add_option("genspec", sim.genspec_path, "generator spec JSON")->required();
    cmd_sim->add_option("-o,--out", sim.out_dir, "output directory (default $TVBARC_OUT_DIR or .)");

    try {
        app.parse(argc, argv);
        if (cmd_ingest->parsed()) return run_ingest(ingest);
        if (cmd_fit->parsed()) return run_fit(fit);
        if (cmd_cp->parsed()) return run_changepoint(cp);
        if (cmd_acf->parsed()) return run_acf(acf);
        if (cmd_sim->parsed()) return run_simulate(sim);
        return 1;
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const tvbarc::data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const tvbarc::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
