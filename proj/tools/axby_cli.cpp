#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "axby/arith.hpp"
#include "axby/buchstab.hpp"
#include "axby/conjecture.hpp"
#include "axby/hecke.hpp"
#include "axby/numtheory.hpp"
#include "axby/quadfield.hpp"
#include "axby/sieve.hpp"
#include "report.hpp"

using namespace axby;
using namespace axby::cli;

namespace {

struct Leaf {
    CLI::App* app;
    std::string name;
    std::function<void(Manifest&)> run;
};

std::string csv_num(double x) {
    return fmt17(x);
}

double parse_ratio(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return std::stod(s);
        double p = std::stod(s.substr(0, slash)), q = std::stod(s.substr(slash + 1));
        if (q == 0) throw ValidationError("zero denominator in " + s);
        return p / q;
    } catch (const std::invalid_argument&) {
        throw ValidationError("not a number: " + s);
    }
}

// "B1:B2:steps"
std::vector<std::pair<double, double>> parse_boxes(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw ValidationError("--boxes expects B1:B2:steps");
    return doubling_ladder(parse_ratio(parts[0]), parse_ratio(parts[1]), std::stoi(parts[2]));
}

// Flat key=value config, appended as --key value unless the flag is already on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args, std::string& config_path) {
    std::vector<std::string> kept;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (config_path.empty()) return kept;
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot read config " + config_path);
    std::string line;
    auto trim = [](std::string x) {
        auto b = x.find_first_not_of(" \t\r"), e = x.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        std::string flag = "--" + key;
        bool given = false;
        for (auto& a : kept) given |= a == flag || a.rfind(flag + "=", 0) == 0;
        if (given) continue;
        if (value == "true") {
            kept.push_back(flag);
        } else if (value != "false") {
            kept.push_back(flag);
            kept.push_back(value);
        }
    }
    return kept;
}

void collect_parameters(const CLI::App* app, Manifest& m) {
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames()[0];
        if (name == "help") continue;
        std::string value;
        if (opt->get_type_size() == 0) {
            value = opt->count() ? "true" : "false";
        } else if (opt->count()) {
            for (auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        m.parameters[name] = value;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolkit for quadratic fields, Hecke eigenvalues, sieve sums and Buchstab constants on a x^2 + b y^3"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::vector<Leaf> leaves;
    int threads = 1;
    std::string out;

    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
        CLI::App* s = parent->add_subcommand(name, desc);
        s->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
        s->add_option("--out", out, "output file, '-' or empty for stdout; relative paths go under $AXBY_OUT_DIR");
        return s;
    };

    // field
    auto* field = app.add_subcommand("field", "real quadratic field invariants");
    field->require_subcommand(1);
    i64 disc = 5, dmax = 1000;
    bool check_cnf = false;
    const std::string field_cols = "CSV columns: d,h,regulator,L1,cnf_residual";
    {
        auto* s = leaf(field, "info", "invariants of one field. " + field_cols);
        s->add_option("--disc", disc, "fundamental discriminant")->required();
        leaves.push_back({s, "field info", [&](Manifest& m) {
                              FundamentalDiscriminant D(disc);
                              RealQuadraticField F(D);
                              std::ostringstream csv;
                              csv << "d,h,regulator,L1,cnf_residual\n";
                              csv << disc << ',' << F.group().h << ',' << csv_num(static_cast<double>(F.regulator())) << ','
                                  << csv_num(static_cast<double>(l_one_exact(D))) << ','
                                  << csv_num(verify_class_number_formula(D)) << '\n';
                              emit_csv(out, m, csv.str());
                          }});
    }
    {
        auto* s = leaf(field, "scan", "every fundamental discriminant up to --max. " + field_cols);
        s->add_option("--max", dmax, "largest discriminant")->check(CLI::Range(5, 10'000'000));
        s->add_flag("--check-cnf", check_cnf, "report the worst class number formula residual on stderr");
        leaves.push_back({s, "field scan", [&](Manifest& m) {
                              std::ostringstream csv;
                              csv << "d,h,regulator,L1,cnf_residual\n";
                              double worst = 0;
                              for (i64 d = 5; d <= dmax; ++d) {
                                  if (!is_fundamental_discriminant(d)) continue;
                                  FundamentalDiscriminant D(d);
                                  RealQuadraticField F(D);
                                  long double L1 = l_one_exact(D);
                                  double res = static_cast<double>(
                                      std::fabs(2.0L * F.group().h * F.regulator() / (std::sqrt(static_cast<long double>(d)) * L1) - 1));
                                  worst = std::max(worst, res);
                                  csv << d << ',' << F.group().h << ',' << csv_num(static_cast<double>(F.regulator())) << ','
                                      << csv_num(static_cast<double>(L1)) << ',' << csv_num(res) << '\n';
                              }
                              emit_csv(out, m, csv.str());
                              if (check_cnf) std::cerr << "max cnf residual " << fmt17(worst) << '\n';
                          }});
    }

    // hecke
    auto* hecke = app.add_subcommand("hecke", "Hecke eigenvalues");
    hecke->require_subcommand(1);
    i64 ell = 0;
    int chi_idx = 0;
    u64 nmax = 100;
    {
        auto* s = leaf(hecke, "table", "lambda(n) for n <= --max. CSV columns: n,re,im");
        s->add_option("--disc", disc, "fundamental discriminant")->required();
        s->add_option("--ell", ell, "xi exponent l");
        s->add_option("--chi", chi_idx, "class character index");
        s->add_option("--max", nmax, "largest n")->check(CLI::Range(1ull, 100'000'000ull));
        leaves.push_back({s, "hecke table", [&](Manifest& m) {
                              auto fam = HeckeFamily::canonical(RealQuadraticField::make(disc));
                              auto chi = HeckeCharacter::from_index(fam, ell, chi_idx);
                              EigenvalueTable tab(chi, static_cast<std::uint32_t>(nmax));
                              std::ostringstream csv;
                              csv << "n,re,im\n";
                              for (u64 n = 1; n <= nmax; ++n) {
                                  auto v = tab[static_cast<std::uint32_t>(n)];
                                  csv << n << ',' << csv_num(v.real()) << ',' << csv_num(v.imag()) << '\n';
                              }
                              emit_csv(out, m, csv.str());
                          }});
    }

    // analysis
    auto* analysis = app.add_subcommand("analysis", "smooth weights and Poisson summation");
    analysis->require_subcommand(1);
    u64 q = 1;
    i64 residue = 0, H = -1;
    double N = 1000, lo = 1, hi = 2, delta = 0.1, eta = 0.5;
    {
        auto* s = leaf(analysis, "poisson-check", "truncated Poisson summation for n = a mod q against the direct sum");
        s->add_option("--q", q, "modulus")->check(CLI::Range(1ull, 1'000'000ull));
        s->add_option("--a", residue, "residue class");
        s->add_option("--N", N, "scale");
        s->add_option("--lo", lo, "support start of the bump");
        s->add_option("--hi", hi, "support end of the bump");
        s->add_option("--delta", delta, "ramp parameter");
        s->add_option("--H", H, "frequency cutoff; -1 picks the smallest admissible H");
        s->add_option("--eta", eta, "exponent used when picking H");
        leaves.push_back({s, "analysis poisson-check", [&](Manifest& m) {
                              SmoothBump g(lo, hi, delta);
                              i64 h = H >= 0 ? H : poisson_min_H(g, N, q, eta);
                              auto r = poisson_check(g, N, q, residue, h);
                              Json d;
                              d["H"] = r.H;
                              d["lhs"] = r.lhs;
                              d["rhs"] = r.rhs;
                              d["discrepancy"] = r.discrepancy;
                              emit_json(out, m, d);
                          }});
    }

    // arith
    auto* arith = app.add_subcommand("arith", "congruence counts and exponential sums");
    arith->require_subcommand(1);
    i64 a = 1, b = 1, n1 = 1, n2 = 1;
    u64 pmax = 100, c = 7, X_int = 10000;
    double constant = 3;
    {
        auto* s = leaf(arith, "weil", "max |S_p(h1,h2)| per prime. CSV columns: p,max_abs,h1,h2,ratio,substitution_ok");
        s->add_option("--a", a, "coefficient a");
        s->add_option("--b", b, "coefficient b");
        s->add_option("--pmax", pmax, "largest prime")->check(CLI::Range(2ull, 100'000ull));
        s->add_option("--constant", constant, "bound constant C in C sqrt(p)");
        leaves.push_back({s, "arith weil", [&](Manifest& m) {
                              auto scan = weil_scan(a, b, pmax, constant, threads);
                              std::ostringstream csv;
                              csv << "p,max_abs,h1,h2,ratio,substitution_ok\n";
                              for (auto& r : scan.rows)
                                  csv << r.p << ',' << csv_num(r.max_abs) << ',' << r.h1 << ',' << r.h2 << ','
                                      << csv_num(r.ratio) << ',' << (r.substitution_ok ? 1 : 0) << '\n';
                              emit_csv(out, m, csv.str());
                              std::cerr << "violations " << scan.violations << ", worst ratio " << fmt17(scan.worst_ratio) << '\n';
                          }});
    }
    {
        auto* s = leaf(arith, "cubic-count", "#{(y1,y2) mod c : n1 y2^3 = n2 y1^3}. CSV columns: c,n1,n2,count");
        s->add_option("--c", c, "modulus")->check(CLI::Range(1ull, 100'000'000ull));
        s->add_option("--n1", n1, "n1");
        s->add_option("--n2", n2, "n2");
        leaves.push_back({s, "arith cubic-count", [&](Manifest& m) {
                              std::ostringstream csv;
                              csv << "c,n1,n2,count\n" << c << ',' << n1 << ',' << n2 << ',' << cubic_congruence_count(c, n1, n2) << '\n';
                              emit_csv(out, m, csv.str());
                          }});
    }
    {
        auto* s = leaf(arith, "heath-brown", "K = 3 identity against mu(n) for n <= --X");
        s->add_option("--X", X_int, "range")->check(CLI::Range(1ull, 100'000'000ull));
        leaves.push_back({s, "arith heath-brown", [&](Manifest& m) {
                              auto r = heath_brown_scan(X_int);
                              Json d;
                              d["X"] = r.X;
                              d["cutoff"] = r.cutoff;
                              d["mismatches"] = r.mismatches;
                              d["first_mismatch"] = r.first_mismatch;
                              emit_json(out, m, d);
                          }});
    }

    // conjecture
    auto* conj = app.add_subcommand("conjecture", "eigenvalue sums along binary cubic forms");
    conj->require_subcommand(1);
    i64 c1 = 1, c2 = 1;
    std::string boxes = "50:50:4", checkpoint, ladder_str = "50,100,200,400";
    int trials = 64;
    i64 mval = 19;
    double Bu = 1.5, eta_ls = 0.1;
    u64 seed = 1;
    i64 Nls = 10;
    double B1 = 50, B2 = 50, ell_cap = 1, T = 0, max_work = 5e9;
    {
        auto* s = leaf(conj, "scan", "per-box sums and fitted exponent for one character");
        s->add_option("--a", a, "congruence modulus a");
        s->add_option("--b", b, "scale b applied to |C/a|");
        s->add_option("--c1", c1, "form coefficient c1");
        s->add_option("--c2", c2, "form coefficient c2");
        s->add_option("--disc", disc, "fundamental discriminant")->required();
        s->add_option("--ell", ell, "xi exponent l");
        s->add_option("--chi", chi_idx, "class character index");
        s->add_option("--boxes", boxes, "B1:B2:steps, box i is (B1 2^i, B2 2^i)");
        s->add_option("--checkpoint", checkpoint, "per-box checkpoint file");
        leaves.push_back({s, "conjecture scan", [&](Manifest& m) {
                              auto fam = HeckeFamily::canonical(RealQuadraticField::make(disc));
                              auto chi = HeckeCharacter::from_index(fam, ell, chi_idx);
                              auto rep = conjecture_scan(chi, {c1, c2}, a, b, parse_boxes(boxes), threads, checkpoint);
                              Json d;
                              d["parameters"] = {{"a", a}, {"b", b}, {"c1", c1}, {"c2", c2}, {"disc", disc}, {"ell", ell}, {"chi", chi_idx}};
                              d["boxes"] = Json::array();
                              for (auto& r : rep.boxes)
                                  d["boxes"].push_back({{"B1", r.B1}, {"B2", r.B2}, {"re", r.sum_value.real()}, {"im", r.sum_value.imag()},
                                                        {"abs", std::abs(r.sum_value)}, {"trivial_bound", r.trivial_bound},
                                                        {"max_divisor_count", r.max_divisor_count}});
                              if (rep.fit)
                                  d["fit"] = {{"slope", rep.fit->slope}, {"epsilon", rep.fit->epsilon}, {"residual", rep.fit->residual}};
                              else
                                  d["fit"] = nullptr;
                              emit_json(out, m, d);
                          }});
    }
    {
        auto* s = leaf(conj, "calibrate", "fitted exponent for constant and random sign weights");
        s->add_option("--a", a, "congruence modulus a");
        s->add_option("--c1", c1, "form coefficient c1");
        s->add_option("--c2", c2, "form coefficient c2");
        s->add_option("--ladder", ladder_str, "comma separated square boxes");
        s->add_option("--trials", trials, "random trials")->check(CLI::Range(1, 100000));
        s->add_option("--seed", seed, "random seed");
        leaves.push_back({s, "conjecture calibrate", [&](Manifest& m) {
                              std::vector<double> Bs;
                              std::stringstream ss(ladder_str);
                              std::string tok;
                              while (std::getline(ss, tok, ',')) Bs.push_back(parse_ratio(tok));
                              auto ladder = square_ladder(Bs);
                              auto ones = exponent_scan_weights([](u64) { return 1.0; }, {c1, c2}, a, ladder);
                              auto rnd = random_sign_calibration({c1, c2}, a, ladder, trials, seed);
                              Json d;
                              d["ladder"] = Bs;
                              d["ones"] = {{"epsilon", ones.epsilon}, {"residual", ones.residual}, {"magnitudes", ones.magnitudes}};
                              d["random"] = {{"epsilon", rnd.epsilon}, {"residual", rnd.residual}, {"magnitudes", rnd.magnitudes}};
                              emit_json(out, m, d);
                          }});
    }
    {
        auto* s = leaf(conj, "aggregate", "sum over n1, n2, chi, l of absolute flat sums");
        s->add_option("--N", Nls, "range of n1, n2")->check(CLI::Range(1, 1000));
        s->add_option("--B1", B1, "box B1");
        s->add_option("--B2", B2, "box B2");
        s->add_option("--a", a, "a");
        s->add_option("--b", b, "b");
        s->add_option("--ell-cap", ell_cap, "|l| <= cap N^eta R");
        s->add_option("--eta", eta_ls, "eta");
        s->add_option("--T", T, "flat cut, 0 means B1 + B2");
        s->add_option("--max-work", max_work, "budget in character evaluations");
        s->add_option("--checkpoint", checkpoint, "per-pair checkpoint file");
        leaves.push_back({s, "conjecture aggregate", [&](Manifest& m) {
                              LargeSieveConfig cfg;
                              cfg.N = Nls;
                              cfg.B1 = B1;
                              cfg.B2 = B2;
                              cfg.a = a;
                              cfg.b = b;
                              cfg.ell_cap_factor = ell_cap;
                              cfg.eta = eta_ls;
                              cfg.T = T;
                              cfg.max_work = max_work;
                              cfg.checkpoint = checkpoint;
                              cfg.threads = threads;
                              auto rep = large_sieve_aggregate(cfg);
                              Json d;
                              d["value"] = rep.value;
                              d["envelope"] = rep.envelope;
                              d["ratio"] = rep.envelope > 0 ? rep.value / rep.envelope : 0.0;
                              d["cells"] = rep.terms;
                              d["pairs"] = Json::array();
                              for (auto& p : rep.pairs)
                                  d["pairs"].push_back({{"n1", p.n1}, {"n2", p.n2}, {"field_disc", p.field_disc},
                                                        {"cells", p.characters}, {"ell_max", p.ell_max}, {"value", p.value}});
                              emit_json(out, m, d);
                          }});
    }
    {
        auto* s = leaf(conj, "upsilon", "#{y1, y2 in (B, 2B] : n1 b y2^3 - n2 b y1^3 = a m}");
        s->add_option("--n1", n1, "n1");
        s->add_option("--n2", n2, "n2");
        s->add_option("--m", mval, "m");
        s->add_option("--B", Bu, "B");
        s->add_option("--a", a, "a");
        s->add_option("--b", b, "b");
        leaves.push_back({s, "conjecture upsilon", [&](Manifest& m) {
                              Json d;
                              d["count"] = upsilon_count(n1, n2, mval, Bu, a, b);
                              emit_json(out, m, d);
                          }});
    }

    // primes / sieve
    auto* primes = app.add_subcommand("primes", "weighted counts over a x^2 + b y^3");
    primes->require_subcommand(1);
    double X = 1e6;
    std::string weight = "lambda";
    u64 dcap = 100;
    {
        auto* s = leaf(primes, "count", "sum of lambda, mobius or k-fold lambda over x <= X^(1/2), y <= X^(1/3)");
        s->add_option("--a", a, "a");
        s->add_option("--b", b, "b");
        s->add_option("--X", X, "size");
        s->add_option("--weight", weight, "lambda | mobius | k-fold:K");
        leaves.push_back({s, "primes count", [&](Manifest& m) {
                              auto cfg = RepConfig::sharp(a, b, X);
                              CountReport r;
                              if (weight == "lambda")
                                  r = lambda_weighted_sum(cfg, threads);
                              else if (weight == "mobius")
                                  r = mobius_weighted_sum(cfg, threads);
                              else if (weight.rfind("k-fold:", 0) == 0)
                                  r = almost_prime_sum(cfg, std::stoi(weight.substr(7)), threads);
                              else
                                  throw ValidationError("unknown weight " + weight);
                              m.parameters["runtime"] = fmt17(r.runtime);
                              Json d;
                              d["weight"] = r.weight;
                              d["a"] = a;
                              d["b"] = b;
                              d["X"] = X;
                              d["A"] = cfg.A;
                              d["B"] = cfg.B;
                              d["weighted_sum"] = r.weighted_sum;
                              d["normalizer"] = r.normalizer;
                              d["ratio"] = r.ratio;
                              d["terms"] = r.terms;
                              emit_json(out, m, d);
                          }});
    }
    auto* sieve = app.add_subcommand("sieve", "Type I counts");
    sieve->require_subcommand(1);
    {
        auto* s = leaf(sieve, "typeI", "counts of a x^2 + b y^3 = 0 mod d. CSV columns: d,count,expected,relative_error");
        s->add_option("--a", a, "a");
        s->add_option("--b", b, "b");
        s->add_option("--X", X, "size");
        s->add_option("--dmax", dcap, "largest squarefree d");
        leaves.push_back({s, "sieve typeI", [&](Manifest& m) {
                              auto rows = type_one_scan(RepConfig::sharp(a, b, X), dcap, threads);
                              std::ostringstream csv;
                              csv << "d,count,expected,relative_error\n";
                              for (auto& r : rows)
                                  csv << r.d << ',' << r.count << ',' << csv_num(r.expected) << ',' << csv_num(r.relative_error) << '\n';
                              emit_csv(out, m, csv.str());
                          }});
    }

    // buchstab
    auto* buch = app.add_subcommand("buchstab", "Buchstab function and sieve integrals");
    buch->require_subcommand(1);
    std::string eps_str = "1/17";
    int resolution = 4;
    double step = 0.01, umax = 10;
    {
        auto* s = leaf(buch, "integrals", "D4, D6 and 1 - D4 - D6 for eps given as p/q or decimal");
        s->add_option("--eps", eps_str, "eps in (0, 1/4)");
        s->add_option("--resolution", resolution, "cells per piece")->check(CLI::Range(1, 64));
        leaves.push_back({s, "buchstab integrals", [&](Manifest& m) {
                              auto lb = lower_bound_constant(parse_ratio(eps_str), resolution);
                              Json d;
                              d["eps"] = parse_ratio(eps_str);
                              d["d4"] = {{"value", lb.d4.value}, {"error", lb.d4.error}};
                              d["d6"] = {{"value", lb.d6.value}, {"error", lb.d6.error}, {"excluded_mass", lb.d6.excluded_mass}};
                              d["lower_bound"] = {{"value", lb.value}, {"error", lb.error}};
                              d["resolution"] = resolution;
                              emit_json(out, m, d);
                          }});
    }
    {
        auto* s = leaf(buch, "table", "omega(u) on a grid. CSV columns: u,omega");
        s->add_option("--step", step, "grid spacing")->check(CLI::Range(1e-4, 1.0));
        s->add_option("--umax", umax, "last u")->check(CLI::Range(1.0, 100.0));
        leaves.push_back({s, "buchstab table", [&](Manifest& m) {
                              std::ostringstream csv;
                              csv << "u,omega\n";
                              long n = std::lround((umax - 1) / step);
                              for (long i = 0; i <= n; ++i) {
                                  double u = 1 + i * step;
                                  csv << csv_num(u) << ',' << csv_num(omega(u)) << '\n';
                              }
                              emit_csv(out, m, csv.str());
                          }});
    }

    std::string config_path;
    std::vector<std::string> args;
    try {
        args = apply_config(std::vector<std::string>(argv + 1, argv + argc), config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (auto& l : leaves) {
        if (!l.app->parsed()) continue;
        Manifest m;
        m.subcommand = l.name;
        collect_parameters(l.app, m);
        if (!config_path.empty()) m.parameters["config"] = config_path;
        try {
            l.run(m);
        } catch (const ValidationError& e) {
            std::cerr << "ValidationError: " << e.what() << '\n';
            return 2;
        } catch (const DegenerateForm& e) {
            std::cerr << "DegenerateForm: " << e.what() << '\n';
            return 2;
        } catch (const InsufficientLadder& e) {
            std::cerr << "InsufficientLadder: " << e.what() << '\n';
            return 2;
        } catch (const BudgetExceeded& e) {
            std::cerr << "BudgetExceeded: " << e.what() << '\n';
            return 3;
        } catch (const OverflowUnit& e) {
            std::cerr << "OverflowUnit: " << e.what() << '\n';
            return 3;
        } catch (const CeilingExceeded& e) {
            std::cerr << "CeilingExceeded: " << e.what() << '\n';
            return 3;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }
    return 2;
}
