#ifndef PATHLR_CONFIG_HPP
#define PATHLR_CONFIG_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pathlr/errors.hpp"
#include "pathlr/expr.hpp"
#include "pathlr/mesh.hpp"
#include "pathlr/problems.hpp"
#include "pathlr/solver.hpp"

namespace pathlr {

struct McSettings {
    Index K = 1000000;
    std::uint64_t seed = 1;
    double x0 = 0.0;
    bool antithetic = false;
};

/// One benchmark run: problem selection, discretization, solver knobs and
/// output sinks.  Flat key=value text with an optional [mc] section; every
/// field has a matching CLI flag.
struct RunConfig {
    std::string problem = "cauchy";  // harmonic | cauchy | impurity | custom
    std::string V_expr;              // custom problems: V(x, t)
    std::string f_expr;              // custom problems: f(x)
    std::optional<double> sigma;     // defaults depend on the problem
    std::optional<double> T;
    std::optional<Index> N_x;
    Index n = 128;
    std::vector<Index> n_sweep;
    double a_x = 2.0;
    double beta = 1.0;  // harmonic initial width
    double eps_c = 1e-10;
    Index r0 = 4;
    Index r_max = 64;
    Index dense_switch_k = 20;
    bool dense_on_full_rank = false;
    std::string time_rule = "trapezoid";
    std::string spatial_rule = "rectangle";
    Index memory_budget_mb = 4096;
    bool timings = true;
    std::string output;  // empty: stdout
    McSettings mc;
    bool has_mc = false;

    double resolved_sigma() const {
        if (sigma) return *sigma;
        if (problem == "harmonic" || problem == "impurity") return 0.25;
        if (problem == "cauchy") return 0.5;
        throw config_error("custom problems need an explicit sigma");
    }
    double resolved_T() const {
        if (T) return *T;
        if (problem == "harmonic") return 10.0;
        if (problem == "cauchy") return 1.0;
        if (problem == "impurity") return 20.0;
        throw config_error("custom problems need an explicit T");
    }
    Index resolved_N_x() const {
        if (N_x) return *N_x;
        if (problem == "impurity") return 8000;
        if (problem == "harmonic" || problem == "cauchy") return 4000;
        throw config_error("custom problems need an explicit N_x");
    }

    ProblemSpec make_problem() const {
        const double sg = resolved_sigma();
        const double horizon = resolved_T();
        if (problem == "harmonic") return harmonic_problem(beta, sg, horizon);
        if (problem == "cauchy") return cauchy_problem(sg, horizon);
        if (problem == "impurity") return impurity_problem(sg, horizon);
        if (problem == "custom") {
            if (V_expr.empty() || f_expr.empty())
                throw config_error("custom problems need both V and f expressions");
            ProblemSpec p;
            Expression V = Expression::parse(V_expr);
            Expression f = Expression::parse(f_expr);
            p.V = [V](double x, double t) { return V(x, t); };
            p.f = [f](double x) { return f(x, 0.0); };
            p.sigma = sg;
            p.T = horizon;
            p.name = "custom";
            return p;
        }
        throw config_error("unknown problem '" + problem + "'");
    }

    SolverConfig solver_config() const {
        SolverConfig c;
        c.eps_c = eps_c;
        c.r0 = r0;
        c.r_max = r_max;
        c.dense_switch_k = dense_switch_k;
        c.dense_on_full_rank = dense_on_full_rank;
        c.memory_budget_mb = memory_budget_mb;
        return c;
    }

    std::vector<Index> sweep_or_single() const {
        return n_sweep.empty() ? std::vector<Index>{n} : n_sweep;
    }

    void validate() const {
        if (eps_c <= 0.0 || eps_c >= 1.0) throw config_error("eps_c must lie in (0, 1)");
        if (a_x <= 0.0) throw config_error("a_x must be positive");
        if (n < 1) throw config_error("n must be at least 1");
        if (r0 < 1 || r_max < r0) throw config_error("need 1 <= r0 <= r_max");
        if (dense_switch_k < 1) throw config_error("dense_switch_k must be at least 1");
        if (sigma && *sigma <= 0.0) throw config_error("sigma must be positive");
        if (T && *T <= 0.0) throw config_error("T must be positive");
        if (N_x && *N_x < 1) throw config_error("N_x must be at least 1");
        if (beta <= 0.0) throw config_error("beta must be positive");
        if (mc.K < 1) throw config_error("mc.K must be at least 1");
        for (size_t i = 0; i < n_sweep.size(); ++i) {
            if (n_sweep[i] < 1) throw config_error("n_sweep entries must be positive");
            if (i > 0 && n_sweep[i] != 2 * n_sweep[i - 1])
                throw config_error("n_sweep entries must double (order estimation)");
        }
        parse_rule(time_rule);
        parse_rule(spatial_rule);
        if (problem == "custom") {
            Expression::parse(V_expr);
            Expression::parse(f_expr);
        }
    }

    void set(const std::string& section, const std::string& key, const std::string& value,
             int line = -1) {
        auto fail = [&](const std::string& msg) {
            std::string where = line >= 0 ? "line " + std::to_string(line) + ": " : "";
            throw config_error(where + msg);
        };
        try {
            if (section == "mc") {
                has_mc = true;
                if (key == "K")
                    mc.K = std::stoll(value);
                else if (key == "seed")
                    mc.seed = std::stoull(value);
                else if (key == "x0")
                    mc.x0 = std::stod(value);
                else if (key == "antithetic")
                    mc.antithetic = parse_bool(value);
                else
                    fail("unknown key 'mc." + key + "'");
                return;
            }
            if (key == "problem")
                problem = value;
            else if (key == "V")
                V_expr = value;
            else if (key == "f")
                f_expr = value;
            else if (key == "sigma")
                sigma = std::stod(value);
            else if (key == "T")
                T = std::stod(value);
            else if (key == "n")
                n = std::stoll(value);
            else if (key == "n_sweep")
                n_sweep = parse_sweep(value);
            else if (key == "a_x")
                a_x = std::stod(value);
            else if (key == "N_x")
                N_x = std::stoll(value);
            else if (key == "beta")
                beta = std::stod(value);
            else if (key == "eps_c")
                eps_c = std::stod(value);
            else if (key == "r0")
                r0 = std::stoll(value);
            else if (key == "r_max")
                r_max = std::stoll(value);
            else if (key == "dense_switch_k")
                dense_switch_k = std::stoll(value);
            else if (key == "dense_on_full_rank")
                dense_on_full_rank = parse_bool(value);
            else if (key == "time_rule")
                time_rule = value;
            else if (key == "spatial_rule")
                spatial_rule = value;
            else if (key == "memory_budget_mb")
                memory_budget_mb = std::stoll(value);
            else if (key == "timings")
                timings = parse_bool(value);
            else if (key == "output")
                output = value;
            else
                fail("unknown key '" + key + "'");
        } catch (const config_error&) {
            throw;
        } catch (const expr_error&) {
            throw;
        } catch (const std::exception&) {
            fail("malformed value for '" + key + "': " + value);
        }
    }

    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = strip_comment(raw);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw config_error("line " + std::to_string(line) + ": malformed section");
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw config_error("line " + std::to_string(line) + ": expected key = value");
            cfg.set(section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
        }
        return cfg;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::string serialize() const {
        std::ostringstream os;
        os.precision(17);
        os << "problem = " << problem << "\n";
        if (!V_expr.empty()) os << "V = " << V_expr << "\n";
        if (!f_expr.empty()) os << "f = " << f_expr << "\n";
        if (sigma) os << "sigma = " << *sigma << "\n";
        if (T) os << "T = " << *T << "\n";
        os << "n = " << n << "\n";
        if (!n_sweep.empty()) {
            os << "n_sweep = ";
            for (size_t i = 0; i < n_sweep.size(); ++i)
                os << (i ? "," : "") << n_sweep[i];
            os << "\n";
        }
        os << "a_x = " << a_x << "\n";
        if (N_x) os << "N_x = " << *N_x << "\n";
        os << "beta = " << beta << "\n";
        os << "eps_c = " << eps_c << "\n";
        os << "r0 = " << r0 << "\n";
        os << "r_max = " << r_max << "\n";
        os << "dense_switch_k = " << dense_switch_k << "\n";
        os << "dense_on_full_rank = " << (dense_on_full_rank ? "true" : "false") << "\n";
        os << "time_rule = " << time_rule << "\n";
        os << "spatial_rule = " << spatial_rule << "\n";
        os << "memory_budget_mb = " << memory_budget_mb << "\n";
        os << "timings = " << (timings ? "true" : "false") << "\n";
        if (!output.empty()) os << "output = " << output << "\n";
        if (has_mc) {
            os << "[mc]\n";
            os << "K = " << mc.K << "\n";
            os << "seed = " << mc.seed << "\n";
            os << "x0 = " << mc.x0 << "\n";
            os << "antithetic = " << (mc.antithetic ? "true" : "false") << "\n";
        }
        return os.str();
    }

private:
    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static std::string strip_comment(const std::string& s) {
        const auto h = s.find('#');
        return h == std::string::npos ? s : s.substr(0, h);
    }
    static bool parse_bool(const std::string& v) {
        if (v == "true" || v == "on" || v == "1") return true;
        if (v == "false" || v == "off" || v == "0") return false;
        throw config_error("expected a boolean, got '" + v + "'");
    }
    static std::vector<Index> parse_sweep(const std::string& v) {
        std::vector<Index> out;
        std::istringstream in(v);
        std::string tok;
        while (std::getline(in, tok, ',')) out.push_back(std::stoll(trim(tok)));
        if (out.empty()) throw config_error("empty n_sweep");
        return out;
    }
};

}  // namespace pathlr

#endif  // PATHLR_CONFIG_HPP
