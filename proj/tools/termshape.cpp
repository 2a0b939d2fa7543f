// Command-line front end: classification, segmentation, envelope export,
// consistent-dynamics analytics, simulation and series ingestion.
//
// Exit codes: 0 success, 1 domain/numerical error, 2 usage error.
// Diagnostics go to stderr; the data stream carries only the document.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "termshape/termshape.hpp"

namespace {

using namespace termshape;

struct OutputOpts {
    std::string format = "json";
    std::string path;
};

void add_output_opts(CLI::App* cmd, OutputOpts& out) {
    cmd->add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--out", out.path, "Write the document to PATH instead of stdout");
}

void emit(const OutputOpts& opts, const std::string& doc) {
    if (opts.path.empty()) {
        std::cout << doc;
        return;
    }
    std::ofstream f(opts.path);
    if (!f) throw IoError("cannot open output file '" + opts.path + "'");
    f << doc;
}

CurveKind parse_kind(const std::string& s) {
    return s == "yield" ? CurveKind::yield : CurveKind::forward;
}

struct CurveArgs {
    std::vector<double> beta;
    double tau1 = 1.0;
    double tau2 = 0.0;  // 0 = default to tau1/2
    std::string curve = "forward";

    CurveParams params() const {
        if (beta.size() != 4)
            throw ArgumentError("--beta expects four comma-separated values b0,b1,b2,b3");
        const double t2 = tau2 > 0 ? tau2 : tau1 / 2.0;
        return CurveParams(beta[0], beta[1], beta[2], beta[3], tau1, t2);
    }
    CurveKind kind() const { return parse_kind(curve); }
};

void add_curve_args(CLI::App* cmd, CurveArgs& args, bool with_curve = true) {
    if (with_curve)
        cmd->add_option("--curve", args.curve, "Curve kind")
            ->check(CLI::IsMember({"forward", "yield"}))
            ->capture_default_str();
    cmd->add_option("--beta", args.beta, "Coefficients b0,b1,b2,b3")
        ->delimiter(',')
        ->expected(4)
        ->required();
    cmd->add_option("--tau1", args.tau1, "First time scale (years)")->required();
    cmd->add_option("--tau2", args.tau2, "Second time scale (default: tau1/2)");
}

struct DynamicsArgs {
    double beta0 = 0, beta1 = 0, beta2 = 0, beta3 = 1, tau1 = 1;
    DynamicsInitial initial() const { return DynamicsInitial(beta0, beta1, beta2, beta3, tau1); }
};

void add_dynamics_args(CLI::App* cmd, DynamicsArgs& args) {
    cmd->add_option("--beta0", args.beta0, "Level coefficient")->capture_default_str();
    cmd->add_option("--beta1", args.beta1, "Slope coefficient")->capture_default_str();
    cmd->add_option("--beta2", args.beta2, "First curvature coefficient")->required();
    cmd->add_option("--beta3", args.beta3, "Second curvature coefficient (must be > 0)")
        ->required();
    cmd->add_option("--tau1", args.tau1, "Time scale (tau2 is pinned at tau1/2)")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Term-structure shape analytics for the Nelson-Siegel, Bliss and Svensson "
                 "families"};
    app.require_subcommand(1);

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Shape of a single parameter vector");
    CurveArgs classify_args;
    OutputOpts classify_out;
    add_curve_args(classify_cmd, classify_args);
    add_output_opts(classify_cmd, classify_out);

    // segment
    auto* segment_cmd = app.add_subcommand("segment", "Classify a gamma-plane grid");
    CurveArgs segment_args;
    OutputOpts segment_out;
    std::vector<double> grid_spec;
    unsigned segment_threads = 1;
    segment_cmd->add_option("--curve", segment_args.curve, "Curve kind")
        ->check(CLI::IsMember({"forward", "yield"}))
        ->capture_default_str();
    segment_cmd->add_option("--beta", segment_args.beta,
                            "Template coefficients b0,b1,b2,b3 (beta3 sets the polarity)")
        ->delimiter(',')
        ->expected(4);
    segment_cmd->add_option("--tau1", segment_args.tau1, "First time scale")->required();
    segment_cmd->add_option("--tau2", segment_args.tau2, "Second time scale (default: tau1/2)");
    segment_cmd->add_option("--grid", grid_spec, "Window x0,x1,y0,y1,nx,ny")
        ->delimiter(',')
        ->expected(6)
        ->required();
    segment_cmd->add_option("--threads", segment_threads, "Worker thread cap")
        ->capture_default_str();
    add_output_opts(segment_cmd, segment_out);

    // envelope
    auto* envelope_cmd = app.add_subcommand("envelope", "Export the augmented envelope");
    CurveArgs envelope_args;
    OutputOpts envelope_out;
    double envelope_horizon = 0.0;
    std::size_t envelope_n = 1024;
    envelope_cmd->add_option("--curve", envelope_args.curve, "Curve kind")
        ->check(CLI::IsMember({"forward", "yield"}))
        ->capture_default_str();
    envelope_cmd->add_option("--beta", envelope_args.beta,
                             "Template coefficients b0,b1,b2,b3 (beta3 != 0)")
        ->delimiter(',')
        ->expected(4);
    envelope_cmd->add_option("--tau1", envelope_args.tau1, "First time scale")->required();
    envelope_cmd->add_option("--tau2", envelope_args.tau2, "Second time scale (default: tau1/2)");
    envelope_cmd->add_option("--t", envelope_horizon,
                             "Family horizon (0 = infinite when scale-regular, else 16 max(tau))");
    envelope_cmd->add_option("--n", envelope_n, "Envelope sample count")->capture_default_str();
    add_output_opts(envelope_cmd, envelope_out);

    // attainable
    auto* attainable_cmd =
        app.add_subcommand("attainable", "Published attainable-shape set for a family");
    CurveArgs attainable_args;
    OutputOpts attainable_out;
    add_curve_args(attainable_cmd, attainable_args, false);
    add_output_opts(attainable_cmd, attainable_out);

    // horizons
    auto* horizons_cmd = app.add_subcommand("horizons", "Shape-loss horizons of the dynamics");
    DynamicsArgs horizons_args;
    OutputOpts horizons_out;
    add_dynamics_args(horizons_cmd, horizons_args);
    add_output_opts(horizons_cmd, horizons_out);

    // probabilities
    auto* prob_cmd = app.add_subcommand("probabilities", "Exact shape probabilities at time t");
    DynamicsArgs prob_args;
    OutputOpts prob_out;
    std::string prob_curve = "forward";
    double prob_t = 1.0;
    prob_cmd->add_option("--curve", prob_curve, "Curve kind")
        ->check(CLI::IsMember({"forward", "yield"}))
        ->capture_default_str();
    add_dynamics_args(prob_cmd, prob_args);
    prob_cmd->add_option("--t", prob_t, "Evaluation time")->required();
    add_output_opts(prob_cmd, prob_out);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo shape frequencies at time t");
    DynamicsArgs sim_args;
    OutputOpts sim_out;
    std::string sim_curve = "forward";
    double sim_t = 1.0;
    std::size_t sim_n = 10000;
    std::uint64_t seed = 0;
    unsigned sim_threads = 1;
    sim_cmd->add_option("--curve", sim_curve, "Curve kind")
        ->check(CLI::IsMember({"forward", "yield"}))
        ->capture_default_str();
    add_dynamics_args(sim_cmd, sim_args);
    sim_cmd->add_option("--t", sim_t, "Evaluation time")->required();
    sim_cmd->add_option("--n", sim_n, "Sample count")->capture_default_str();
    sim_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--threads", sim_threads, "Worker thread cap")->capture_default_str();
    add_output_opts(sim_cmd, sim_out);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a parameter series and report");
    OutputOpts ingest_out;
    std::string ingest_path;
    std::string ingest_curve = "forward";
    ParseConfig ingest_cfg;
    std::string ingest_delim = ",";
    ingest_cmd->add_option("input", ingest_path, "Delimited input file")->required();
    ingest_cmd->add_option("--curve", ingest_curve, "Curve kind for the shape tally")
        ->check(CLI::IsMember({"forward", "yield"}))
        ->capture_default_str();
    ingest_cmd->add_option("--delimiter", ingest_delim, "Field delimiter")->capture_default_str();
    ingest_cmd->add_option("--date-column", ingest_cfg.date_column)->capture_default_str();
    ingest_cmd->add_option("--beta0-column", ingest_cfg.beta0_column)->capture_default_str();
    ingest_cmd->add_option("--beta1-column", ingest_cfg.beta1_column)->capture_default_str();
    ingest_cmd->add_option("--beta2-column", ingest_cfg.beta2_column)->capture_default_str();
    ingest_cmd->add_option("--beta3-column", ingest_cfg.beta3_column)->capture_default_str();
    ingest_cmd->add_option("--tau1-column", ingest_cfg.tau1_column)->capture_default_str();
    ingest_cmd->add_option("--tau2-column", ingest_cfg.tau2_column)->capture_default_str();
    ingest_cmd->add_option("--date-format", ingest_cfg.date_format,
                           "Date tokens, e.g. YYYY-MM-DD or DD.MM.YYYY")
        ->capture_default_str();
    add_output_opts(ingest_cmd, ingest_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify_cmd->parsed()) {
            const auto shape = classify_direct(classify_args.kind(), classify_args.params());
            emit(classify_out, classify_out.format == "csv" ? io::shape_csv(shape)
                                                            : io::to_json(shape).dump(2) + "\n");
        } else if (segment_cmd->parsed()) {
            if (segment_args.beta.empty()) segment_args.beta = {0, 0, 0, 1};
            const GridSpec grid{grid_spec[0], grid_spec[1], grid_spec[2], grid_spec[3],
                                static_cast<std::size_t>(grid_spec[4]),
                                static_cast<std::size_t>(grid_spec[5])};
            const auto recs =
                segment_grid(segment_args.kind(), segment_args.params(), grid, segment_threads);
            emit(segment_out, segment_out.format == "csv" ? io::grid_csv(recs)
                                                          : io::to_json(recs).dump(2) + "\n");
        } else if (envelope_cmd->parsed()) {
            if (envelope_args.beta.empty()) envelope_args.beta = {0, 0, 0, 1};
            const auto params = envelope_args.params();
            double horizon = envelope_horizon;
            if (horizon <= 0) {
                horizon = params.tau1() > params.tau2()
                              ? std::numeric_limits<double>::infinity()
                              : 16.0 * std::fmax(params.tau1(), params.tau2());
            }
            const auto env = build_envelope(envelope_args.kind(), params, horizon, envelope_n);
            emit(envelope_out, envelope_out.format == "csv" ? io::envelope_csv(env)
                                                            : io::to_json(env).dump(2) + "\n");
        } else if (attainable_cmd->parsed()) {
            const auto params = attainable_args.params();
            const double r = params.tau1() / params.tau2();
            const auto family = params.family();
            const auto sign = params.beta3() >= 0 ? Polarity::positive : Polarity::negative;
            const auto shapes = attainable_shapes(family, r, sign);
            if (attainable_out.format == "csv") {
                std::string csv = "shape\n";
                for (auto tag : shapes) csv += std::string(to_string(tag)) + "\n";
                emit(attainable_out, csv);
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (auto tag : shapes) arr.push_back(to_string(tag));
                const nlohmann::json doc{{"family", to_string(family)},
                                         {"r", r},
                                         {"beta3_sign", params.beta3() >= 0 ? "+" : "-"},
                                         {"shapes", arr}};
                emit(attainable_out, doc.dump(2) + "\n");
            }
        } else if (horizons_cmd->parsed()) {
            const auto h = horizons(horizons_args.initial());
            emit(horizons_out, io::to_json(h).dump(2) + "\n");
        } else if (prob_cmd->parsed()) {
            const auto dist =
                shape_probabilities(parse_kind(prob_curve), prob_args.initial(), prob_t);
            emit(prob_out, prob_out.format == "csv" ? io::distribution_csv(dist)
                                                    : io::to_json(dist).dump(2) + "\n");
        } else if (sim_cmd->parsed()) {
            const auto dist = sample_shapes(parse_kind(sim_curve), sim_args.initial(), sim_t,
                                            sim_n, seed, sim_threads);
            emit(sim_out, sim_out.format == "csv" ? io::distribution_csv(dist)
                                                  : io::to_json(dist).dump(2) + "\n");
        } else if (ingest_cmd->parsed()) {
            if (ingest_delim.size() != 1) throw ArgumentError("--delimiter must be one character");
            ingest_cfg.delimiter = ingest_delim[0];
            const auto parsed = parse_series_file(ingest_path, ingest_cfg);
            const auto rep = frequency_report(parsed.series, parse_kind(ingest_curve));
            if (ingest_out.format == "csv") {
                emit(ingest_out, io::report_series_csv(rep));
            } else {
                auto doc = io::to_json(rep);
                nlohmann::json quarantine = nlohmann::json::array();
                for (const auto& q : parsed.quarantine)
                    quarantine.push_back(
                        {{"line", q.line}, {"reason", q.reason}, {"raw", q.raw}});
                doc["quarantine"] = quarantine;
                emit(ingest_out, doc.dump(2) + "\n");
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
