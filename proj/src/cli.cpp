#include "dwell/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "dwell/errors.hpp"
#include "dwell/ffcf.hpp"
#include "dwell/freedwell.hpp"
#include "dwell/residence.hpp"
#include "dwell/scatter.hpp"

namespace dwell::cli {

using nlohmann::json;
using numerics::pi;

namespace {

constexpr double cs_width = 2e-6;      // m
constexpr double cs_height = 8.2674e3;  // hbar s^-1
constexpr double cs_v1 = 3.307;         // hbar s^-1
constexpr double cs_gamma = 33.3e6;     // s^-1

std::string normalise_key(std::string k) {
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || std::isnan(v))
        throw DomainError("parameter '" + key + "': not a number: '" + text + "'");
    return v;
}

json units_json(const UnitSystem& u) {
    return {{"name", u.name}, {"hbar", u.hbar}, {"mass", u.mass}, {"length_m", u.length}};
}

// Parameter reader: defaults are recorded as resolved values, unknown keys
// are rejected by finish().
class Params {
public:
    Params(const std::map<std::string, std::string>& given, std::string command)
        : given_(given), command_(std::move(command)) {}

    double num(const std::string& key, double def) {
        used_.insert(key);
        double v = def;
        if (auto it = given_.find(key); it != given_.end()) v = parse_number(key, it->second);
        resolved_[key] = v;
        return v;
    }
    double positive(const std::string& key, double def) {
        const double v = num(key, def);
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("parameter '" + key + "': must be positive");
        return v;
    }
    int count(const std::string& key, int def, int lo = 2, int hi = 100000) {
        const double v = num(key, def);
        if (v != std::floor(v) || v < lo || v > hi)
            throw DomainError("parameter '" + key + "': need an integer in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
        resolved_[key] = static_cast<int>(v);
        return static_cast<int>(v);
    }
    std::vector<double> list(const std::string& key, const std::vector<double>& def) {
        used_.insert(key);
        std::vector<double> v = def;
        if (auto it = given_.find(key); it != given_.end()) {
            v.clear();
            std::stringstream ss(it->second);
            std::string item;
            while (std::getline(ss, item, ',')) v.push_back(parse_number(key, item));
            if (v.empty()) throw DomainError("parameter '" + key + "': empty list");
        }
        resolved_[key] = v;
        return v;
    }
    std::string text(const std::string& key, const std::string& def) {
        used_.insert(key);
        std::string v = def;
        if (auto it = given_.find(key); it != given_.end()) v = trim(it->second);
        resolved_[key] = v;
        return v;
    }
    bool has(const std::string& key) const { return given_.count(key) > 0; }
    void finish() const {
        for (const auto& [k, v] : given_)
            if (!used_.count(k)) throw DomainError("parameter '" + k + "': not used by command " + command_);
    }
    const json& resolved() const { return resolved_; }

private:
    std::map<std::string, std::string> given_;
    std::string command_;
    std::set<std::string> used_;
    json resolved_ = json::object();
};

std::vector<double> linspace(double lo, double hi, int n) {
    if (!(hi > lo)) throw DomainError("grid: need lower bound < upper bound");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
    return x;
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("grid: need 0 < lower bound < upper bound");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return x;
}

std::string value_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Objects a command exposes to validate().
struct Setup {
    std::optional<MomentumWavepacket> psi;
    std::optional<Region> D;
    std::optional<PiecewisePotential> pot;
    std::optional<UnitSystem> declared_units;
    UnitSystem units;
};

struct Context {
    bool dry = false;
    Setup setup;
    RunOutput out;
};

MomentumWavepacket read_packet(Params& p, double k0, double dk, double alpha, std::optional<double> x0 = {}) {
    FilteredGaussianParams g;
    g.k0 = p.positive("k0", k0);
    g.dk = p.positive("dk", dk);
    g.alpha = p.num("alpha", alpha);
    g.x0 = p.num("x0", x0 ? *x0 : -6.0 / g.dk);
    return MomentumWavepacket::filtered_gaussian(g);
}

Region read_region(Params& p, double x1, double x2) {
    const double a = p.num("x1", x1), b = p.num("x2", x2);
    return Region(a, b);
}

// ---------------------------------------------------------------- figures

void cmd_fig1(Params& p, Context& c) {
    const int n = p.count("points", 400);
    const auto q = linspace(p.positive("q_min", 0.5), p.num("q_max", 20.0), n);
    p.finish();
    if (c.dry) return;
    Curve plus{"fig1_t_plus", {"q [1]", "t_plus [m L^2/hbar]"}, {}};
    Curve minus{"fig1_t_minus", {"q [1]", "t_minus [m L^2/hbar]"}, {}};
    const Region D(0.0, 1.0);
    for (double x : q) {
        const auto e = free_eigenvalues(x, D);
        plus.rows.push_back({x, e.t_plus});
        minus.rows.push_back({x, e.t_minus});
    }
    c.out.curves = {plus, minus};
}

void cmd_fig2(Params& p, Context& c) {
    const double Q = p.positive("Q", 8.0);
    const int n = p.count("points", 400);
    const auto q = linspace(p.positive("q_min", 0.1), p.num("q_max", 30.0), n);
    p.finish();
    if (c.dry) return;
    Curve plus{"fig2_t_plus", {"q [1]", "t_plus [m L^2/hbar]"}, {}};
    Curve minus{"fig2_t_minus", {"q [1]", "t_minus [m L^2/hbar]"}, {}};
    for (double x : q) {
        const auto b = barrier_eigenvalues_closed_form(x, 1.0, 0.5 * Q * Q);
        plus.rows.push_back({x, b.t_plus});
        minus.rows.push_back({x, b.t_minus});
    }
    c.out.curves = {plus, minus};
    c.out.tolerances["closed_form_consistency"] = 1e-10;
}

struct CsBarrier {
    double width, height;
    std::vector<double> v;  // cm/s
};

CsBarrier read_cs_barrier(Params& p, int default_points) {
    CsBarrier b;
    b.width = p.positive("width", cs_width);
    b.height = p.positive("height", cs_height);
    const int n = p.count("points", default_points);
    b.v = linspace(p.positive("v_min", 0.05), p.num("v_max", 1.0), n);
    return b;
}

double cs_k(double v_cm_s, const UnitSystem& u) { return u.mass * v_cm_s * 1e-2 / u.hbar; }

void cmd_fig3(Params& p, Context& c) {
    const UnitSystem cs = UnitSystem::caesium();
    c.setup.units = cs;
    const auto b = read_cs_barrier(p, 400);
    const auto vis = p.list("v_imag", {cs_v1, 10 * cs_v1, 100 * cs_v1, 1000 * cs_v1});
    for (double vi : vis)
        if (!(vi > 0.0)) throw DomainError("parameter 'v_imag': must be positive");
    p.finish();
    if (c.dry) return;
    const auto real = PiecewisePotential::square_barrier(b.width, b.height, 0.0, cs);
    const Region D(0.0, b.width);
    Curve exact{"fig3_exact", {"v [cm/s]", "tau_D [s]"}, {}};
    for (double v : b.v) exact.rows.push_back({v, stationary_dwell(real, D, cs_k(v, cs))});
    c.out.curves.push_back(exact);
    for (double vi : vis) {
        Curve a{"fig3_approx_" + value_tag(vi), {"v [cm/s]", "tau_D approx [s]"}, {}};
        for (double v : b.v) a.rows.push_back({v, fluorescence_dwell_estimate(b.height, vi, b.width, cs_k(v, cs), cs)});
        c.out.curves.push_back(a);
        const auto lp = laser_parameters(b.height, vi, cs_gamma, cs);
        c.out.results["laser_" + value_tag(vi)] = {{"Delta_over_gamma", lp.Delta / cs_gamma},
                                                   {"Omega_over_gamma", lp.Omega / cs_gamma}};
    }
}

void cmd_fig4(Params& p, Context& c) {
    const UnitSystem cs = UnitSystem::caesium();
    c.setup.units = cs;
    const auto b = read_cs_barrier(p, 400);
    const int n = p.count("count", 31);
    const auto vis = logspace(p.positive("v_imag_min", cs_v1), p.num("v_imag_max", 1000 * cs_v1), n);
    p.finish();
    if (c.dry) return;
    const auto real = PiecewisePotential::square_barrier(b.width, b.height, 0.0, cs);
    const Region D(0.0, b.width);
    const double lo = b.v.front(), hi = b.v.back();
    const int pts = static_cast<int>(b.v.size());
    const auto ex = grid_maximum([&](double v) { return stationary_dwell(real, D, cs_k(v, cs)); }, lo, hi, pts);
    Curve e{"fig4", {"absorption [1]", "relative error [1]", "v_imag [hbar/s]"}, {}, true, true};
    for (double vi : vis) {
        const auto ap = grid_maximum(
            [&](double v) { return fluorescence_dwell_estimate(b.height, vi, b.width, cs_k(v, cs), cs); }, lo, hi, pts);
        const auto pot = PiecewisePotential::square_barrier(b.width, b.height, vi, cs);
        const double A = absorption_probability(pot, cs_k(ap.first, cs));
        e.rows.push_back({A, std::abs(ex.second - ap.second) / ex.second, vi});
    }
    c.out.curves = {e};
    c.out.results["exact_maximum"] = {{"v_cm_s", ex.first}, {"tau_D_s", ex.second}};
}

void cmd_fig5(Params& p, Context& c) {
    const Region D(0.0, p.positive("L", 2.0));
    const int n = p.count("points", 600);
    const auto k = linspace(p.positive("k_min", 0.5), p.num("k_max", 10.0), n);
    p.finish();
    if (c.dry) return;
    Curve t1{"fig5_T_kk", {"k [1/L]", "T_kk [t]"}, {}};
    Curve t2{"fig5_T2_kk", {"k [1/L]", "(T^2)_kk [t^2]"}, {}};
    Curve t3{"fig5_T3_kk", {"k [1/L]", "(T^3)_kk [t^3]"}, {}};
    Curve pm{"fig5_ffcf_third", {"k [1/L]", "third ffcf moment [t^3]"}, {}};
    Curve sq{"fig5_T_kk_squared", {"k [1/L]", "(T_kk)^2 [t^2]"}, {}};
    for (double x : k) {
        const Eigen::Matrix2cd M = free_onshell_matrix(x, D).m;
        const Eigen::Matrix2cd M2 = M * M;
        const double a = M(0, 0).real();
        const double b = M2(0, 0).real();
        const double d = (M2 * M)(0, 0).real();
        t1.rows.push_back({x, a});
        t2.rows.push_back({x, b});
        t3.rows.push_back({x, d});
        pm.rows.push_back({x, pm_free_moments(x, D).order3});
        sq.rows.push_back({x, a * a});
    }
    c.out.curves = {t1, t2, t3, pm, sq};
}

void cmd_fig6(Params& p, Context& c) {
    const auto psi = read_packet(p, 2.0, 0.4, 0.5, -15.0);
    const Region D = read_region(p, 0.0, 45.0);
    const int n = p.count("points", 500);
    const auto tau = linspace(p.positive("tau_min", 0.5), p.num("tau_max", 45.0), n);
    const bool moments = p.num("moments", 1.0) != 0.0;
    p.finish();
    c.setup.psi = psi;
    c.setup.D = D;
    if (c.dry) return;
    const auto Pi = free_dwell_distribution(psi, D, tau);
    const FreeFfcf C(psi, D);
    const auto Cs = C.sample(tau);
    Curve a{"fig6_Pi", {"tau [t]", "Pi [1/t]"}, {}};
    Curve b{"fig6_C", {"tau [t]", "C [1/t]"}, {}};
    Curve d{"fig6_pi_classical", {"tau [t]", "pi [1/t]"}, {}};
    for (int i = 0; i < n; ++i) {
        a.rows.push_back({tau[i], Pi.density[i]});
        b.rows.push_back({tau[i], Cs[i].value});
        d.rows.push_back({tau[i], classical_dwell_distribution(psi, D, tau[i])});
    }
    c.out.curves = {a, b, d};
    const auto m = dwell_moments_free(psi, D);
    c.out.results["dwell_m1"] = m.m1;
    c.out.results["dwell_m2"] = m.m2;
    if (moments) {
        c.out.results["ffcf_m1"] = C.moment(1);
        c.out.results["ffcf_m2"] = C.moment(2);
    }
    for (const auto& w : m.warnings) c.out.warnings.push_back(w);
    c.out.tolerances["ffcf_tau_min"] = C.tau_min();
    c.out.tolerances["moment_rel_tol"] = 1e-8;
    c.out.tolerances["singular_exclusion"] = Pi.exclusion;
}

void cmd_fig7(Params& p, Context& c) {
    const auto dks = p.list("dk", {0.4, 0.3, 0.2, 0.1, 0.07, 0.05});
    const double k0 = p.positive("k0", 2.0), alpha = p.num("alpha", 0.5);
    const Region D(0.0, p.positive("L", 100.0));
    p.finish();
    c.setup.D = D;
    for (double dk : dks)
        if (!(dk > 0.0)) throw DomainError("parameter 'dk': must be positive");
    c.setup.psi = MomentumWavepacket::filtered_gaussian({k0, dks.front(), alpha, -6.0 / dks.front()});
    if (c.dry) return;
    Curve e{"fig7", {"dk [1/L]", "relative error [1]", "m2 exact [t^2]", "m2 zeroth order [t^2]"}, {}};
    for (double dk : dks) {
        const auto psi = MomentumWavepacket::filtered_gaussian({k0, dk, alpha, -6.0 / dk});
        const double exact = dwell_moments_free(psi, D).m2;
        const double approx = ZerothOrderFfcf(psi, D).moment(2);
        e.rows.push_back({dk, std::abs(approx / exact - 1.0), exact, approx});
    }
    c.out.curves = {e};
    c.out.tolerances["current_floor"] = 1e-10;
}

// ---------------------------------------------------------------- ad hoc

std::optional<UnitSystem> read_units(Params& p) {
    if (!p.has("units")) return std::nullopt;
    const auto u = p.text("units", "natural");
    if (u == "natural") return UnitSystem::natural();
    if (u == "caesium") return UnitSystem::caesium();
    throw DomainError("parameter 'units': expected natural or caesium");
}

void cmd_dwell(Params& p, Context& c) {
    const auto psi = read_packet(p, 2.0, 0.4, 0.5, -15.0);
    const Region D = read_region(p, 0.0, 45.0);
    const auto file = p.text("potential", "");
    c.setup.declared_units = read_units(p);
    p.finish();
    c.setup.psi = psi;
    c.setup.D = D;
    if (!file.empty()) {
        c.setup.pot = PiecewisePotential::from_file(file);
        c.setup.units = c.setup.pot->units();
    }
    if (c.dry) return;
    double m1, m2;
    if (c.setup.pot && !c.setup.pot->empty()) {
        const auto m = wavepacket_dwell_moments(*c.setup.pot, D, psi);
        m1 = m.m1;
        m2 = m.m2;
    } else {
        const auto m = dwell_moments_free(psi, D);
        m1 = m.m1;
        m2 = m.m2;
        for (const auto& w : m.warnings) c.out.warnings.push_back(w);
    }
    c.out.curves = {Curve{"dwell", {"m1 [t]", "m2 [t^2]"}, {{m1, m2}}}};
    c.out.results["m1"] = m1;
    c.out.results["m2"] = m2;
}

void cmd_barrier(Params& p, Context& c) {
    const double L = p.positive("L", 1.0), V0 = p.num("V0", 32.0);
    const int n = p.count("points", 400);
    const auto k = linspace(p.positive("k_min", 0.1), p.num("k_max", 30.0), n);
    p.finish();
    if (c.dry) return;
    const auto bar = PiecewisePotential::square_barrier(L, V0);
    const Region D(0.0, L);
    Curve e{"barrier", {"k [1/L]", "t_plus [t]", "t_minus [t]", "t_upper general [t]", "t_lower general [t]"}, {}};
    for (double x : k) {
        const auto b = barrier_eigenvalues_closed_form(x, L, V0);
        const auto d = dwell_eigen_decomposition(bar, D, x);
        e.rows.push_back({x, b.t_plus, b.t_minus, d.t_plus, d.t_minus});
    }
    c.out.curves = {e};
}

void cmd_ffcf(Params& p, Context& c) {
    const auto psi = read_packet(p, 2.0, 0.4, 0.5, -15.0);
    const Region D = read_region(p, 0.0, 45.0);
    const int n = p.count("points", 500);
    const double lo = p.positive("tau_min", 0.5);
    const double hi = p.num("tau_max", 2.0 * D.length() / psi.params()->k0);
    const auto tau = linspace(lo, hi, n);
    const auto kernel = p.text("kernel", "analytic");
    if (kernel != "analytic" && kernel != "finite_difference")
        throw DomainError("parameter 'kernel': expected analytic or finite_difference");
    const bool moments = p.num("moments", 1.0) != 0.0;
    p.finish();
    c.setup.psi = psi;
    c.setup.D = D;
    if (c.dry) return;
    const FreeFfcf C(psi, D, {}, kernel == "analytic" ? KernelDerivative::analytic : KernelDerivative::finite_difference);
    Curve e{"ffcf", {"tau [t]", "C [1/t]"}, {}};
    for (const auto& s : C.sample(tau)) e.rows.push_back({s.tau, s.value});
    c.out.curves = {e};
    c.out.results["small_tau_coefficient"] = C.small_tau_coefficient();
    if (moments) {
        c.out.results["m1"] = C.moment(1);
        c.out.results["m2"] = C.moment(2);
    }
    c.out.tolerances["tau_min"] = C.tau_min();
    c.out.tolerances["tau_max"] = C.tau_max();
}

void cmd_fluorescence(Params& p, Context& c) {
    const UnitSystem cs = UnitSystem::caesium();
    c.setup.units = cs;
    const auto b = read_cs_barrier(p, 400);
    const double vi = p.positive("v_imag", cs_v1);
    const double gamma = p.positive("gamma", cs_gamma);
    p.finish();
    if (c.dry) return;
    const auto real = PiecewisePotential::square_barrier(b.width, b.height, 0.0, cs);
    const auto pot = PiecewisePotential::square_barrier(b.width, b.height, vi, cs);
    const Region D(0.0, b.width);
    Curve e{"fluorescence", {"v [cm/s]", "T_kk [s]", "tau_D approx [s]", "absorption [1]"}, {}};
    for (double v : b.v) {
        const double k = cs_k(v, cs);
        e.rows.push_back({v, stationary_dwell(real, D, k), fluorescence_dwell_estimate(b.height, vi, b.width, k, cs),
                          absorption_probability(pot, k)});
    }
    c.out.curves = {e};
    const auto lp = laser_parameters(b.height, vi, gamma, cs);
    c.out.results["Delta_over_gamma"] = lp.Delta / gamma;
    c.out.results["Omega_over_gamma"] = lp.Omega / gamma;
}

void cmd_residence(Params& p, Context& c) {
    const double Omega = p.positive("omega", 1.0);
    const double periods = p.positive("periods", 4.0);
    const int n = p.count("points", 400);
    const int nmax = p.count("ho_n_max", 10, 0, 200);
    const double a = p.num("ho_a", -1.0), b = p.num("ho_b", 1.0);
    const double ho_omega = p.positive("ho_omega", 1.0);
    if (!(b > a)) throw DomainError("parameter 'ho_b': must exceed ho_a");
    p.finish();
    if (c.dry) return;
    const double T_end = periods * 2.0 * pi / Omega;
    Curve e{"residence", {"T [t]", "tau_plus [t]", "tau_minus [t]", "commutator norm [hbar/t]"}, {}};
    for (int i = 1; i <= n; ++i) {
        const double T = T_end * i / n;
        const auto [tp, tm] = residence_eigenvalues(Omega, T);
        e.rows.push_back({T, tp, tm, residence_commutator_norm(Omega, T)});
    }
    Curve h{"residence_oscillator", {"n [1]", "fraction [1]", "eigenvalue [t]"}, {}};
    for (int k = 0; k <= nmax; ++k) {
        const auto f = ho_fraction_of_time(k, a, b, ho_omega);
        h.rows.push_back({static_cast<double>(k), f.fraction, f.eigenvalue});
    }
    c.out.curves = {e, h};
}

using Command = void (*)(Params&, Context&);

const std::map<std::string, Command>& table() {
    static const std::map<std::string, Command> t = {
        {"fig1", cmd_fig1},   {"fig2", cmd_fig2},     {"fig3", cmd_fig3},   {"fig4", cmd_fig4},
        {"fig5", cmd_fig5},   {"fig6", cmd_fig6},     {"fig7", cmd_fig7},   {"dwell", cmd_dwell},
        {"barrier", cmd_barrier}, {"ffcf", cmd_ffcf}, {"fluorescence", cmd_fluorescence},
        {"residence", cmd_residence},
    };
    return t;
}

Context dispatch(const std::string& command, const std::map<std::string, std::string>& params, bool dry) {
    const auto it = table().find(command);
    if (it == table().end()) throw DomainError("unknown command '" + command + "'");
    Params p(params, command);
    Context c;
    c.dry = dry;
    it->second(p, c);
    c.out.params = p.resolved();
    c.out.units = units_json(c.setup.units);
    return c;
}

std::string usage() {
    std::string s = "usage: dwelltime <command> [--param=value ...] [--config=FILE] [--out=DIR] [--svg]\n"
                    "       dwelltime validate <command> [--param=value ...]\ncommands:";
    for (const auto& c : commands()) s += " " + c;
    return s + "\n";
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> c = {"fig1",  "fig2",    "fig3", "fig4",         "fig5",
                                               "fig6",  "fig7",    "dwell", "barrier",     "ffcf",
                                               "fluorescence", "residence"};
    return c;
}

RunConfig parse_arguments(const std::vector<std::string>& args) {
    RunConfig c;
    std::string config_file;
    std::vector<std::string> positional;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) {
            const auto eq = a.find('=');
            const std::string key = normalise_key(a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2));
            if (key.empty()) throw DomainError("malformed argument '" + a + "'");
            if (key == "svg" && eq == std::string::npos) {
                c.svg = true;
                continue;
            }
            if (eq == std::string::npos) throw DomainError("argument '" + a + "': expected --key=value");
            const std::string value = a.substr(eq + 1);
            if (key == "config")
                config_file = value;
            else if (key == "out")
                c.out_dir = value;
            else if (key == "svg")
                c.svg = value != "0" && value != "false";
            else
                c.params[key] = value;
        } else {
            positional.push_back(a);
        }
    }
    if (positional.size() > 2) throw DomainError("unexpected argument '" + positional[2] + "'");
    if (!positional.empty()) c.command = positional[0];
    if (positional.size() == 2) {
        if (c.command != "validate") throw DomainError("unexpected argument '" + positional[1] + "'");
        c.target = positional[1];
    }
    if (!config_file.empty()) merge_config_file(config_file, c);
    if (c.command.empty()) throw DomainError("no command given");
    return c;
}

void merge_config_file(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = normalise_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw DomainError(path + ":" + std::to_string(lineno) + ": empty key");
        if (key == "command") {
            if (config.command.empty()) config.command = value;
        } else if (key == "out") {
            if (config.out_dir == ".") config.out_dir = value;
        } else if (key == "svg") {
            config.svg = config.svg || (value != "0" && value != "false");
        } else {
            config.params.emplace(key, value);
        }
    }
}

RunOutput compute(const RunConfig& config) { return dispatch(config.command, config.params, false).out; }

Diagnostics validate(const RunConfig& config) {
    Diagnostics d;
    const std::string cmd = config.target.empty() ? config.command : config.target;
    Context c;
    try {
        c = dispatch(cmd, config.params, true);
    } catch (const DomainError& e) {
        d.errors.push_back(e.what());
        return d;
    }
    const auto& s = c.setup;
    if (s.psi) {
        const double n2 = s.psi->norm2();
        if (!(std::abs(n2 - 1.0) < 1e-8)) d.errors.push_back("packet norm " + std::to_string(n2) + " differs from 1");
        for (const auto& m : check_domain_condition(*s.psi).messages) d.warnings.push_back(m);
        if (s.D) {
            // initial overlap with the region
            numerics::CompositeRule xs(s.D->x1, s.D->x2, 16);
            double inside = 0.0;
            for (std::size_t i = 0; i < xs.x.size(); ++i)
                inside += xs.w[i] * std::norm(numerics::propagate_free(*s.psi, xs.x[i], 0.0));
            if (inside > 1e-6)
                d.warnings.push_back("initial packet overlaps the region (probability " + value_tag(inside) + ")");
        }
    }
    if (s.pot && !s.pot->empty() && s.D) {
        if (s.pot->support_lo() < s.D->x1 || s.pot->support_hi() > s.D->x2)
            d.errors.push_back("potential support [" + value_tag(s.pot->support_lo()) + ", " +
                               value_tag(s.pot->support_hi()) + "] is not inside the region D");
    }
    if (s.pot && s.declared_units) {
        const auto& a = s.pot->units();
        const auto& b = *s.declared_units;
        if (std::abs(a.hbar / b.hbar - 1.0) > 1e-12 || std::abs(a.mass / b.mass - 1.0) > 1e-12)
            d.errors.push_back("potential file units differ from units = " + b.name);
    }
    return d;
}

std::string format_csv(const Curve& c) {
    std::string s = "# ";
    for (std::size_t i = 0; i < c.columns.size(); ++i) s += (i ? ", " : "") + c.columns[i];
    s += "\n";
    char buf[40];
    for (const auto& row : c.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            if (i) s += ",";
            s += buf;
        }
        s += "\n";
    }
    return s;
}

std::string render_svg(const std::vector<Curve>& curves, const std::string& title) {
    const double W = 640, H = 420, ml = 70, mr = 20, mt = 30, mb = 50;
    bool log_x = false, log_y = false;
    std::vector<double> xs, ys;
    for (const auto& c : curves) {
        log_x = log_x || c.log_x;
        log_y = log_y || c.log_y;
    }
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(tx(x)) && std::isfinite(ty(y)) && (!log_x || x > 0) && (!log_y || y > 0);
    };
    for (const auto& c : curves)
        for (const auto& r : c.rows)
            for (std::size_t j = 1; j < std::min<std::size_t>(r.size(), 2); ++j)
                if (usable(r[0], r[j])) {
                    xs.push_back(tx(r[0]));
                    ys.push_back(ty(r[j]));
                }
    if (xs.empty()) return "";
    // y range from the 2nd to 98th percentile so a divergence does not flatten the rest
    std::vector<double> ys_sorted = ys;
    std::sort(ys_sorted.begin(), ys_sorted.end());
    const double y_lo0 = ys_sorted[ys_sorted.size() / 50], y_hi0 = ys_sorted[ys_sorted.size() - 1 - ys_sorted.size() / 50];
    const double pad = 0.1 * std::max(y_hi0 - y_lo0, 1e-300);
    const double y_lo = y_lo0 - pad, y_hi = y_hi0 + pad;
    const double x_lo = *std::min_element(xs.begin(), xs.end()), x_hi = *std::max_element(xs.begin(), xs.end());
    auto px = [&](double v) { return ml + (W - ml - mr) * (tx(v) - x_lo) / std::max(x_hi - x_lo, 1e-300); };
    auto py = [&](double v) {
        const double y = std::clamp(ty(v), y_lo, y_hi);
        return H - mb - (H - mt - mb) * (y - y_lo) / (y_hi - y_lo);
    };
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << ml << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ml << "\" y=\"" << H - 15 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << curves.front().columns.front() << (log_x ? " (log)" : "") << "  range " << value_tag(log_x ? std::pow(10, x_lo) : x_lo)
      << " .. " << value_tag(log_x ? std::pow(10, x_hi) : x_hi) << "; y " << value_tag(log_y ? std::pow(10, y_lo) : y_lo)
      << " .. " << value_tag(log_y ? std::pow(10, y_hi) : y_hi) << (log_y ? " (log)" : "") << "</text>\n";
    int colour = 0;
    for (const auto& c : curves) {
        const std::size_t ncol = c.columns.size();
        for (std::size_t j = 1; j < std::min<std::size_t>(ncol, 2); ++j) {
            o << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colours[colour % 6] << "\" points=\"";
            for (const auto& r : c.rows)
                if (usable(r[0], r[j])) o << px(r[0]) << "," << py(r[j]) << " ";
            o << "\"/>\n";
            o << "<text x=\"" << W - mr - 200 << "\" y=\"" << mt + 15 + 14 * colour
              << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colours[colour % 6] << "\">" << c.name
              << "</text>\n";
            ++colour;
        }
    }
    o << "</svg>\n";
    return o.str();
}

json run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto diag = validate(config);
    if (!diag.ok()) {
        std::string msg = diag.errors.front();
        for (std::size_t i = 1; i < diag.errors.size(); ++i) msg += "; " + diag.errors[i];
        throw DomainError(msg);
    }
    auto out = compute(config);
    for (const auto& w : diag.warnings) out.warnings.insert(out.warnings.begin(), w);
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    json outputs = json::array();
    auto write = [&](const std::string& name, const std::string& text) {
        const fs::path path = fs::path(config.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DomainError("cannot write '" + path.string() + "'");
        f << text;
    };
    for (const auto& c : out.curves) {
        write(c.name + ".csv", format_csv(c));
        outputs.push_back({{"file", c.name + ".csv"}, {"columns", c.columns}, {"rows", c.rows.size()}});
    }
    if (config.svg) {
        const auto svg = render_svg(out.curves, config.command);
        if (!svg.empty()) {
            write(config.command + ".svg", svg);
            outputs.push_back({{"file", config.command + ".svg"}});
        }
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m = {{"command", config.command},
              {"params", out.params},
              {"units", out.units},
              {"tolerances", out.tolerances.is_null() ? json::object() : out.tolerances},
              {"results", out.results.is_null() ? json::object() : out.results},
              {"warnings", out.warnings},
              {"outputs", outputs},
              {"wall_time_s", wall},
              {"version", version}};
    write(config.command + ".manifest.json", m.dump(2) + "\n");
    return m;
}

std::pair<double, double> grid_maximum(const std::function<double(double)>& f, double lo, double hi, int points) {
    const auto x = linspace(lo, hi, points);
    std::size_t best = 0;
    double fb = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = f(x[i]);
        if (v > fb) {
            fb = v;
            best = i;
        }
    }
    const double a = x[best == 0 ? 0 : best - 1], b = x[std::min(best + 1, x.size() - 1)];
    const auto r = boost::math::tools::brent_find_minima([&](double v) { return -f(v); }, a, b, 40);
    if (-r.second > fb) return {r.first, -r.second};
    return {x[best], fb};
}

int main_entry(const std::vector<std::string>& args) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        std::cout << usage();
        return args.empty() ? 1 : 0;
    }
    try {
        const auto config = parse_arguments(args);
        if (config.command == "validate") {
            if (config.target.empty()) throw DomainError("validate: no command given");
            const auto d = validate(config);
            for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";
            for (const auto& e : d.errors) std::cout << "error: " << e << "\n";
            if (d.ok()) std::cout << "ok: " << config.target << "\n";
            return d.ok() ? 0 : 1;
        }
        const auto m = run(config);
        for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
        for (const auto& o : m["outputs"]) std::cout << (std::filesystem::path(config.out_dir) / o["file"].get<std::string>()).string() << "\n";
        return 0;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace dwell::cli
