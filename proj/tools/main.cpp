// Batch front door for the cocycle laboratory: reads cocycle JSON, runs the
// estimators, writes CSV/JSON artifacts. Identical seeds reproduce identical
// artifacts; --workers 1 is the bit-exact reference mode.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cocyclab/io.hpp"
#include "cocyclab/oracles.hpp"

namespace {

using cocyclab::Json;

struct CommonOpts {
    std::uint64_t seed = 0;
    int n = 2000;
    int samples = 200;
    int workers = 1;
    double tol = cocyclab::kDefaultRankTol;
    std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool mc = true) {
    cmd->add_option("--seed", o.seed, "random seed (64-bit)");
    if (mc) {
        cmd->add_option("-n,--length", o.n, "word length");
        cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
    }
    cmd->add_option("--workers", o.workers,
                    "worker threads (1 = bit-exact reference mode)");
    cmd->add_option("--tol", o.tol, "relative rank tolerance");
    cmd->add_option("-o,--output", o.output, "output file (default: stdout)");
}

cocyclab::McOptions mc_options(const CommonOpts& o) {
    cocyclab::McOptions mc;
    mc.n = o.n;
    mc.samples = o.samples;
    mc.seed = o.seed;
    mc.workers = o.workers;
    return mc;
}

Json config_json(const CommonOpts& o, const std::string& subcommand) {
    Json j;
    j["subcommand"] = subcommand;
    j["seed"] = o.seed;
    j["n"] = o.n;
    j["samples"] = o.samples;
    j["workers"] = o.workers;
    j["tol"] = o.tol;
    return j;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        cocyclab::write_text_file(path, text);
    }
}

void emit_json(const std::string& path, const Json& j) {
    emit(path, j.dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

cocyclab::RotationAngle parse_angle(const std::string& alpha_pi, double alpha,
                                    bool have_alpha) {
    if (!alpha_pi.empty()) {
        const auto slash = alpha_pi.find('/');
        if (slash == std::string::npos)
            throw cocyclab::ParseError("--alpha-pi expects p/q");
        const long long p = std::stoll(alpha_pi.substr(0, slash));
        const long long q = std::stoll(alpha_pi.substr(slash + 1));
        return cocyclab::RotationAngle::rational(p, q);
    }
    if (!have_alpha)
        throw cocyclab::ParseError("need --alpha or --alpha-pi");
    return cocyclab::RotationAngle::radians(alpha);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cocyclab: Lyapunov spectra, reductions and large-deviation "
                 "statistics of finitely supported matrix cocycles"};
    app.require_subcommand(1);
    std::function<void()> run;

    // ---- validate -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("validate", "check a cocycle file");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        cmd->add_option("input", *input, "cocycle JSON")->required();
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const cocyclab::ValidationReport rep =
                    cocyclab::validate(c, opts->tol);
                Json j;
                j["config"] = config_json(*opts, "validate");
                j["ok"] = rep.ok();
                j["defects"] = rep.defects;
                j["strict_interior"] = rep.strict_interior;
                j["ranks"] = rep.ranks;
                j["constant_rank"] = rep.constant_rank;
                if (rep.constant_rank) j["rank"] = rep.rank;
                emit_json(opts->output, j);
            };
        });
    }

    // ---- lyapunov -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("lyapunov",
                                       "Monte Carlo top exponent estimate");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        cmd->add_option("input", *input, "cocycle JSON")->required();
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const auto est = cocyclab::top_exponent_mc(c, mc_options(*opts));
                Json j;
                j["config"] = config_json(*opts, "lyapunov");
                j["estimate"] = cocyclab::estimate_to_json(est);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- spectrum -------------------------------------------------------
    {
        auto* cmd = app.add_subcommand("spectrum",
                                       "QR-deflation spectrum estimate");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto imax = std::make_shared<int>(0);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("--imax", *imax, "number of exponents (default: dim)");
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const int want = *imax > 0 ? *imax : c.dim();
                const auto est =
                    cocyclab::spectrum_qr(c, want, mc_options(*opts));
                Json j;
                j["config"] = config_json(*opts, "spectrum");
                j["config"]["imax"] = want;
                j["estimate"] = cocyclab::estimate_to_json(est);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- theta ----------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "theta", "min over symbol pairs of the compound norm of A_i A_j");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto k = std::make_shared<int>(0);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("-k,--rank", *k, "constant rank (default: detected)");
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                int kk = *k;
                if (kk == 0) {
                    const auto rep = cocyclab::validate(c, opts->tol);
                    if (!rep.constant_rank)
                        throw std::domain_error(
                            "theta: cocycle does not have constant rank");
                    kk = rep.rank;
                }
                Json j;
                j["config"] = config_json(*opts, "theta");
                j["config"]["k"] = kk;
                j["theta"] = cocyclab::theta_k(c, kk, opts->tol);
                j["pair_rank_check"] =
                    cocyclab::pair_rank_check(c, kk, opts->tol);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- reduce ---------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "reduce", "build the invertible two-coordinate reduction");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto k = std::make_shared<int>(0);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("-k,--rank", *k, "constant rank (default: detected)");
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                int kk = *k;
                if (kk == 0) {
                    const auto rep = cocyclab::validate(c, opts->tol);
                    if (!rep.constant_rank)
                        throw std::domain_error(
                            "reduce: cocycle does not have constant rank");
                    kk = rep.rank;
                }
                const auto r = cocyclab::reduce(c, kk, opts->tol);
                Json j = cocyclab::reduced_to_json(r);
                j["config"] = config_json(*opts, "reduce");
                j["config"]["k"] = kk;
                emit_json(opts->output, j);
            };
        });
    }

    // ---- check-reduction --------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "check-reduction",
            "verify the intertwining identity and norm-ratio bounds");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto reduced_path = std::make_shared<std::string>();
        auto words = std::make_shared<int>(100);
        auto max_len = std::make_shared<int>(50);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("reduced", *reduced_path, "reduced cocycle JSON")
            ->required();
        cmd->add_option("--words", *words, "number of sampled words");
        cmd->add_option("--max-len", *max_len, "maximum word length");
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const cocyclab::ReducedCocycle r = cocyclab::reduced_from_json(
                    cocyclab::load_json_file(*reduced_path));
                const auto scan = cocyclab::norm_ratio_scan(
                    c, r, *words, *max_len,
                    {*max_len / 4, *max_len / 2, *max_len}, opts->seed);
                double intertwine = 0.0;
                for (int i = 0; i < c.symbols(); ++i)
                    for (int jj = 0; jj < c.symbols(); ++jj)
                        intertwine = std::max(
                            intertwine,
                            (r.bases[i] * r.transitions[i][jj] -
                             c.matrices[i] * r.bases[jj])
                                .norm());
                Json j;
                j["config"] = config_json(*opts, "check-reduction");
                j["config"]["words"] = *words;
                j["config"]["max_len"] = *max_len;
                j["max_residual"] = scan.max_residual;
                j["c_hat"] = scan.c_hat;
                Json buckets = Json::array();
                for (const auto& [cap, chat] : scan.bucket_c_hat) {
                    Json b;
                    b["max_len"] = cap;
                    b["c_hat"] = chat;
                    b["log_ratio_rate"] = scan.bucket_log_rate.at(cap);
                    buckets.push_back(std::move(b));
                }
                j["buckets"] = std::move(buckets);
                j["kappa"] = cocyclab::kappa_diagnostic(c, r, opts->tol);
                j["max_intertwining_defect"] = intertwine;
                emit_json(opts->output, j);
            };
        });
    }

    // ---- irreducible ------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "irreducible",
            "certify irreducibility of the compound cocycles via the "
            "return-word group");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto k = std::make_shared<int>(0);
        auto power = std::make_shared<int>(0);
        auto budget = std::make_shared<int>(64);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("-k,--rank", *k, "constant rank (default: detected)");
        cmd->add_option("--power", *power,
                        "compound power i (default: all 1..k)");
        cmd->add_option("--budget", *budget, "group sample budget");
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                int kk = *k;
                if (kk == 0) {
                    const auto rep = cocyclab::validate(c, opts->tol);
                    if (!rep.constant_rank)
                        throw std::domain_error(
                            "irreducible: cocycle does not have constant rank");
                    kk = rep.rank;
                }
                const auto r = cocyclab::reduce(c, kk, opts->tol);
                Json verdicts = Json::array();
                const int lo = *power > 0 ? *power : 1;
                const int hi = *power > 0 ? *power : kk;
                for (int i = lo; i <= hi; ++i)
                    verdicts.push_back(cocyclab::verdict_to_json(
                        cocyclab::certify_irreducible(c, r, i, *budget,
                                                      opts->seed)));
                Json j;
                j["config"] = config_json(*opts, "irreducible");
                j["config"]["k"] = kk;
                j["config"]["budget"] = *budget;
                j["verdicts"] = std::move(verdicts);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- ldt --------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "ldt", "empirical deviation tail and exponential-rate fit");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto n_grid = std::make_shared<std::string>("50,100,200");
        auto eps_grid = std::make_shared<std::string>("0.05,0.1,0.2");
        auto lref = std::make_shared<double>(0.0);
        auto have_lref = std::make_shared<bool>(false);
        auto fit_out = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("csv");
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("--n-grid", *n_grid, "comma list of word lengths");
        cmd->add_option("--eps-grid", *eps_grid, "comma list of deviations");
        cmd->add_option("--lref", *lref,
                        "reference exponent (default: 10x pilot estimate)")
            ->each([=](const std::string&) { *have_lref = true; });
        cmd->add_option("--fit-out", *fit_out, "write the fit JSON here");
        cmd->add_option("--format", *format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                cocyclab::TailOptions topt;
                topt.n_grid = parse_int_list(*n_grid);
                topt.eps_grid = parse_double_list(*eps_grid);
                topt.samples = opts->samples;
                topt.seed = opts->seed;
                topt.workers = opts->workers;
                double ref = *lref;
                if (!*have_lref) {
                    cocyclab::McOptions pilot = mc_options(*opts);
                    pilot.n = 10 * *std::max_element(topt.n_grid.begin(),
                                                     topt.n_grid.end());
                    pilot.seed = cocyclab::mix64(opts->seed);
                    const auto est = cocyclab::top_exponent_mc(c, pilot);
                    if (cocyclab::is_neg_inf(est.value()))
                        throw std::domain_error(
                            "ldt: pilot estimate is -inf; tails undefined");
                    ref = est.value();
                }
                const auto curve = cocyclab::deviation_tail(c, ref, topt);
                const auto fit = cocyclab::fit_ldt_rate(curve);
                std::vector<std::string> header{
                    "subcommand=ldt",
                    "seed=" + std::to_string(opts->seed),
                    "samples=" + std::to_string(opts->samples),
                    "workers=" + std::to_string(opts->workers),
                    "n_grid=" + *n_grid,
                    "eps_grid=" + *eps_grid,
                    "lref=" + cocyclab::format_double(ref),
                };
                if (*format == "csv") {
                    emit(opts->output, cocyclab::tail_curve_csv(curve, header));
                    if (!fit_out->empty())
                        emit_json(*fit_out, cocyclab::fit_to_json(fit));
                } else {
                    Json j;
                    j["config"] = config_json(*opts, "ldt");
                    j["config"]["n_grid"] = topt.n_grid;
                    j["config"]["eps_grid"] = topt.eps_grid;
                    j["config"]["lref"] = ref;
                    Json rows = Json::array();
                    for (const auto& row : curve) {
                        Json rj;
                        rj["n"] = row.n;
                        rj["epsilon"] = row.epsilon;
                        rj["p_hat"] = row.p_hat;
                        rj["stderr"] = row.se;
                        rj["samples"] = row.samples;
                        rows.push_back(std::move(rj));
                    }
                    j["tail"] = std::move(rows);
                    j["fit"] = cocyclab::fit_to_json(fit);
                    emit_json(opts->output, j);
                    if (!fit_out->empty())
                        emit_json(*fit_out, cocyclab::fit_to_json(fit));
                }
            };
        });
    }

    // ---- ldt-uniform --------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "ldt-uniform",
            "probe the deviation constants over a constant-rank neighborhood");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto k = std::make_shared<int>(0);
        auto radius = std::make_shared<double>(0.05);
        auto trials = std::make_shared<int>(10);
        auto n_grid = std::make_shared<std::string>("50,100,200");
        auto eps_grid = std::make_shared<std::string>("0.05,0.1,0.2");
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("-k,--rank", *k, "constant rank (default: detected)");
        cmd->add_option("--radius", *radius, "multiplicative perturbation size");
        cmd->add_option("--trials", *trials, "number of sampled neighbors");
        cmd->add_option("--n-grid", *n_grid, "comma list of word lengths");
        cmd->add_option("--eps-grid", *eps_grid, "comma list of deviations");
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                int kk = *k;
                if (kk == 0) {
                    const auto rep = cocyclab::validate(c, opts->tol);
                    if (!rep.constant_rank)
                        throw std::domain_error(
                            "ldt-uniform: cocycle does not have constant rank");
                    kk = rep.rank;
                }
                cocyclab::TailOptions topt;
                topt.n_grid = parse_int_list(*n_grid);
                topt.eps_grid = parse_double_list(*eps_grid);
                topt.samples = opts->samples;
                topt.seed = opts->seed;
                topt.workers = opts->workers;
                const auto res = cocyclab::uniform_ldt_probe(
                    c, kk, *radius, *trials, topt, opts->seed);
                Json j;
                j["config"] = config_json(*opts, "ldt-uniform");
                j["config"]["k"] = kk;
                j["config"]["radius"] = *radius;
                j["config"]["trials"] = *trials;
                j["config"]["n_grid"] = topt.n_grid;
                j["config"]["eps_grid"] = topt.eps_grid;
                j["min_c_hat"] = res.min_c_rate;
                j["max_C_hat"] = res.max_c_big;
                j["fit_failures"] = res.fit_failures;
                j["rejected_neighbors"] = res.rejected_neighbors;
                Json fits = Json::array();
                for (const auto& f : res.fits)
                    fits.push_back(cocyclab::fit_to_json(f));
                j["fits"] = std::move(fits);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- holder -------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "holder", "empirical modulus of continuity of the top exponent");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        auto deltas = std::make_shared<std::string>(
            "0.001,0.002,0.005,0.01,0.02,0.05,0.1");
        auto dir_seed = std::make_shared<std::uint64_t>(1);
        cmd->add_option("input", *input, "cocycle JSON")->required();
        cmd->add_option("--deltas", *deltas, "comma list of perturbation sizes");
        cmd->add_option("--dir-seed", *dir_seed,
                        "seed for the perturbation direction");
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const auto path = cocyclab::random_direction(c, *dir_seed);
                const auto grid = parse_double_list(*deltas);
                const auto fit = cocyclab::holder_probe(
                    c, path, grid, mc_options(*opts));
                Json j;
                j["config"] = config_json(*opts, "holder");
                j["config"]["deltas"] = grid;
                j["config"]["dir_seed"] = *dir_seed;
                j["fit"] = cocyclab::holder_to_json(fit);
                emit_json(opts->output, j);
            };
        });
    }

    // ---- rotation -------------------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "rotation", "projection/rotation family: series oracle, "
                        "stationary check, angle scans");
        auto opts = std::make_shared<CommonOpts>();
        auto alpha = std::make_shared<double>(0.0);
        auto have_alpha = std::make_shared<bool>(false);
        auto alpha_pi = std::make_shared<std::string>();
        auto big_j = std::make_shared<int>(64);
        auto series = std::make_shared<bool>(false);
        auto stationary = std::make_shared<bool>(false);
        auto mc = std::make_shared<bool>(false);
        auto scan = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("csv");
        cmd->add_option("--alpha", *alpha, "angle in radians")
            ->each([=](const std::string&) { *have_alpha = true; });
        cmd->add_option("--alpha-pi", *alpha_pi,
                        "exact angle pi*p/q, written p/q");
        cmd->add_option("-J,--terms", *big_j, "series truncation order");
        cmd->add_flag("--series", *series, "evaluate the series oracle");
        cmd->add_flag("--stationary", *stationary,
                      "check the truncated stationary measure");
        cmd->add_flag("--mc", *mc, "Monte Carlo estimate of the top exponent");
        cmd->add_option("--scan", *scan,
                        "angle grid lo:hi:count for a series/MC table");
        cmd->add_option("--format", *format, "csv or json (scan output)")
            ->check(CLI::IsMember({"csv", "json"}));
        add_common(cmd, *opts);
        cmd->callback([=, &run] {
            run = [=] {
                Json j;
                j["config"] = config_json(*opts, "rotation");
                j["config"]["J"] = *big_j;
                if (!scan->empty()) {
                    std::stringstream ss(*scan);
                    std::string lo_s, hi_s, count_s;
                    std::getline(ss, lo_s, ':');
                    std::getline(ss, hi_s, ':');
                    std::getline(ss, count_s, ':');
                    const double lo = std::stod(lo_s), hi = std::stod(hi_s);
                    const int count = std::stoi(count_s);
                    std::vector<cocyclab::RotationAngle> grid;
                    for (int i = 0; i < count; ++i)
                        grid.push_back(cocyclab::RotationAngle::radians(
                            count == 1 ? lo
                                       : lo + (hi - lo) * i / (count - 1)));
                    const auto rows = cocyclab::rotation_alpha_scan(
                        grid, *big_j, mc_options(*opts));
                    if (*format == "csv") {
                        std::ostringstream os;
                        os << "# subcommand=rotation-scan seed=" << opts->seed
                           << " n=" << opts->n << " samples=" << opts->samples
                           << " J=" << *big_j << " grid=" << *scan << "\n";
                        os << "alpha,series,series_neg_inf,tail_unreliable,"
                              "mc_value,mc_stderr,mc_zero_fraction\n";
                        for (const auto& row : rows) {
                            os << cocyclab::format_double(
                                      row.alpha.radians_value())
                               << ','
                               << (row.series_neg_inf
                                       ? std::string("-inf")
                                       : cocyclab::format_double(row.series))
                               << ',' << (row.series_neg_inf ? 1 : 0) << ','
                               << (row.tail_unreliable ? 1 : 0) << ','
                               << (cocyclab::is_neg_inf(row.mc_value)
                                       ? std::string("-inf")
                                       : cocyclab::format_double(row.mc_value))
                               << ',' << cocyclab::format_double(row.mc_se)
                               << ','
                               << cocyclab::format_double(row.mc_zero_fraction)
                               << "\n";
                        }
                        emit(opts->output, os.str());
                        return;
                    }
                    Json rows_json = Json::array();
                    for (const auto& row : rows) {
                        Json rj;
                        rj["alpha"] = row.alpha.radians_value();
                        rj["series"] = cocyclab::extended_to_json(
                            row.series_neg_inf ? cocyclab::kNegInf
                                               : row.series);
                        rj["neg_inf"] = row.series_neg_inf;
                        rj["tail_unreliable"] = row.tail_unreliable;
                        rj["mc_value"] =
                            cocyclab::extended_to_json(row.mc_value);
                        rj["mc_stderr"] = row.mc_se;
                        rj["mc_zero_fraction"] = row.mc_zero_fraction;
                        rows_json.push_back(std::move(rj));
                    }
                    j["scan"] = std::move(rows_json);
                    emit_json(opts->output, j);
                    return;
                }
                const auto angle = parse_angle(*alpha_pi, *alpha, *have_alpha);
                j["config"]["alpha"] = angle.radians_value();
                if (angle.is_rational_pi())
                    j["config"]["alpha_pi"] = std::to_string(angle.p()) + "/" +
                                              std::to_string(angle.q());
                bool did = false;
                if (*series) {
                    const auto oracle =
                        cocyclab::rotation_series_L1(angle, *big_j);
                    Json s;
                    s["J"] = oracle.J;
                    s["value"] = cocyclab::extended_to_json(oracle.partial_sum);
                    s["neg_inf"] = oracle.neg_inf_hit;
                    if (oracle.neg_inf_hit) s["neg_inf_j"] = oracle.neg_inf_j;
                    s["kernel_solvable"] = oracle.kernel_solvable;
                    s["tail_unreliable"] = oracle.tail_unreliable;
                    j["series"] = std::move(s);
                    did = true;
                }
                if (*stationary) {
                    const auto check =
                        cocyclab::rotation_stationary_check(angle, *big_j);
                    Json s;
                    s["J"] = *big_j;
                    s["kernel_hit"] = check.kernel_hit;
                    if (check.kernel_hit)
                        s["kernel_j"] = check.kernel_j;
                    else
                        s["residual"] = check.residual;
                    j["stationary"] = std::move(s);
                    did = true;
                }
                if (*mc || !did) {
                    const auto est = cocyclab::top_exponent_mc(
                        cocyclab::rotation_cocycle(angle), mc_options(*opts));
                    j["mc"] = cocyclab::estimate_to_json(est);
                }
                emit_json(opts->output, j);
            };
        });
    }

    // ---- rank1-oracle -----------------------------------------------------
    {
        auto* cmd = app.add_subcommand(
            "rank1-oracle", "closed-form top exponent of a rank-one family");
        auto opts = std::make_shared<CommonOpts>();
        auto input = std::make_shared<std::string>();
        cmd->add_option("input", *input, "cocycle JSON")->required();
        add_common(cmd, *opts, /*mc=*/false);
        cmd->callback([=, &run] {
            run = [=] {
                const cocyclab::Cocycle c = cocyclab::load_cocycle(*input);
                const double v = cocyclab::rank_one_exact_L1(c, opts->tol);
                Json j;
                j["config"] = config_json(*opts, "rank1-oracle");
                j["L1"] = cocyclab::extended_to_json(v);
                emit_json(opts->output, j);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        run();
    } catch (const cocyclab::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
