#include "dmpair/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dmpair/traces.hpp"

namespace dmpair {

using nlohmann::json;

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return double(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double a, double b) { return a + (b - a) * uniform(); }

namespace {

Poly parse_dense_1d_xt(const json& arr) {
    Poly p;
    for (std::size_t i = 0; i < arr.size(); ++i)
        for (std::size_t k = 0; k < arr[i].size(); ++k) {
            const double c = arr[i][k].get<double>();
            if (c != 0.0) p = p + Poly::monomial(int(i), 0, int(k), c);
        }
    return p;
}

Poly parse_dense_2d_xyt(const json& arr) {
    Poly p;
    for (std::size_t i = 0; i < arr.size(); ++i)
        for (std::size_t j = 0; j < arr[i].size(); ++j)
            for (std::size_t k = 0; k < arr[i][j].size(); ++k) {
                const double c = arr[i][j][k].get<double>();
                if (c != 0.0) p = p + Poly::monomial(int(i), int(j), int(k), c);
            }
    return p;
}

Poly parse_dense_1d_x(const json& arr) {
    Poly p;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const double c = arr[i].get<double>();
        if (c != 0.0) p = p + Poly::monomial(int(i), 0, 0, c);
    }
    return p;
}

Poly parse_dense_2d_xy(const json& arr) {
    Poly p;
    for (std::size_t i = 0; i < arr.size(); ++i)
        for (std::size_t j = 0; j < arr[i].size(); ++j) {
            const double c = arr[i][j].get<double>();
            if (c != 0.0) p = p + Poly::monomial(int(i), int(j), 0, c);
        }
    return p;
}

[[noreturn]] void load_error(const std::string& pointer, const std::string& what) {
    throw std::runtime_error("scenario load error at " + pointer + ": " + what);
}

std::map<std::string, double> default_tolerances() {
    return {
        {"divergence_identity", 1e-6}, {"route_definition", 1e-6},
        {"route_mollified", 1e-3},     {"variation_bound", 1e-9},
        {"field_inequalities", 1e-9},  {"trace_flux", 1e-3},
        {"trace_jump", 1e-8},          {"gauss_green", 1e-8},
        {"gauss_green_quadrature", 1e-5}, {"glue", 1e-8},
        {"glue_oracle", 1e-6},
    };
}

} // namespace

const FinitePerimeterSet& Scenario::polygon(const std::string& pname) const {
    for (const auto& p : polygons)
        if (p.name == pname) return p.set;
    throw std::runtime_error("scenario: unknown polygon '" + pname + "'");
}

double Scenario::tol(const std::string& key) const {
    const auto it = tolerances.find(key);
    if (it != tolerances.end()) return it->second;
    const auto defs = default_tolerances();
    return defs.at(key);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("scenario JSON parse failure: ") + e.what());
    }

    Scenario sc;
    sc.name = j.value("name", "scenario");
    if (!j.contains("domain")) load_error("/domain", "missing");
    const auto& jd = j["domain"];
    const int dim = jd.value("dimension", 0);
    if (dim != 1 && dim != 2) load_error("/domain/dimension", "must be 1 or 2");

    if (dim == 1) {
        const auto b = jd["bounds"];
        std::vector<Interval> cells;
        for (const auto& c : jd["cells"]) cells.push_back({c[0].get<double>(), c[1].get<double>()});
        sc.domain = make_domain_1d(b[0].get<double>(), b[1].get<double>(), cells);
    } else {
        const auto b = jd["bounds"];
        const Vec2 lo{b[0][0].get<double>(), b[0][1].get<double>()};
        const Vec2 hi{b[1][0].get<double>(), b[1][1].get<double>()};
        std::vector<Polygon> cells;
        for (const auto& c : jd["cells"]) {
            Polygon p;
            for (const auto& v : c) p.v.push_back({v[0].get<double>(), v[1].get<double>()});
            cells.push_back(p);
        }
        sc.domain = make_domain_2d(lo, hi, cells);
    }

    if (!j.contains("field")) load_error("/field", "missing");
    {
        const auto& jf = j["field"];
        const double T = jf.value("t_max", 0.0);
        std::vector<std::vector<Poly>> comps;
        for (const auto& cell : jf["cells"]) {
            std::vector<Poly> cc;
            for (const auto& comp : cell)
                cc.push_back(dim == 1 ? parse_dense_1d_xt(comp) : parse_dense_2d_xyt(comp));
            comps.push_back(std::move(cc));
        }
        sc.field = std::make_shared<PiecewiseField>(sc.domain, std::move(comps), T);
    }

    if (!j.contains("bv")) load_error("/bv", "missing");
    {
        const auto& jb = j["bv"];
        std::vector<Poly> cells;
        for (const auto& cell : jb["cells"])
            cells.push_back(dim == 1 ? parse_dense_1d_x(cell) : parse_dense_2d_xy(cell));
        std::optional<PiecewiseBV::CantorData> cantor;
        if (jb.contains("cantor")) {
            PiecewiseBV::CantorData cd;
            cd.coeff = jb["cantor"]["coefficient"].get<double>();
            cd.a = jb["cantor"]["interval"][0].get<double>();
            cd.b = jb["cantor"]["interval"][1].get<double>();
            cantor = cd;
        }
        sc.bv = std::make_shared<PiecewiseBV>(sc.domain, std::move(cells), cantor);
        if (sc.bv->sup_norm() > sc.field->t_max() + 1e-12)
            load_error("/bv", "‖u‖_∞ exceeds the field t range");
    }

    for (const auto& jp : j.value("polygons", json::array())) {
        const std::string name = jp.value("name", "");
        if (jp.contains("intervals")) {
            std::vector<Interval> ivs;
            for (const auto& iv : jp["intervals"])
                ivs.push_back({iv[0].get<double>(), iv[1].get<double>()});
            sc.polygons.push_back({name, FinitePerimeterSet::from_intervals(ivs)});
        } else {
            Polygon p;
            for (const auto& v : jp["vertices"]) p.v.push_back({v[0].get<double>(), v[1].get<double>()});
            sc.polygons.push_back({name, FinitePerimeterSet::from_polygon(p)});
        }
    }

    for (const auto& jt : j.value("test_functions", json::array())) {
        Vec2 c{jt["center"][0].get<double>(),
               dim == 2 ? jt["center"][1].get<double>() : 0.0};
        const double r = jt["radius"].get<double>();
        if (jt.value("plateau", false)) {
            sc.test_functions.push_back(TestFunction::plateau(c, r, dim));
        } else if (jt.contains("prefactor")) {
            const Poly pre = dim == 1 ? parse_dense_1d_x(jt["prefactor"])
                                      : parse_dense_2d_xy(jt["prefactor"]);
            sc.test_functions.push_back(TestFunction(c, r, pre, dim));
        } else {
            sc.test_functions.push_back(
                TestFunction::bump(c, r, dim, jt.value("amplitude", 1.0)));
        }
        if (!sc.test_functions.back().supported_inside(*sc.domain))
            load_error("/test_functions", "support leaves the domain");
    }
    if (j.contains("random_test_functions")) {
        sc.random_count = j["random_test_functions"].value("count", 0);
        sc.seed = j["random_test_functions"].value("seed", 1234567ULL);
    }

    if (j.contains("eps_sequence")) {
        const double e0 = j["eps_sequence"].value("eps0", 0.1);
        const double ratio = j["eps_sequence"].value("ratio", 0.5);
        const int count = j["eps_sequence"].value("count", 4);
        double e = e0;
        for (int k = 0; k < count; ++k) {
            sc.eps_sequence.push_back(e);
            e *= ratio;
        }
    }

    for (const auto& c : j.value("checks", json::array()))
        sc.checks.push_back(c.get<std::string>());

    if (j.contains("tolerances"))
        for (const auto& [key, val] : j["tolerances"].items())
            sc.tolerances[key] = val.get<double>();

    if (j.contains("glue")) {
        GlueConfig g;
        g.polygon = j["glue"]["polygon"].get<std::string>();
        const std::string mode = j["glue"].value("mode", "matching");
        g.mode = mode == "zero-outside" ? GlueConfig::Mode::ZeroOutside
                                        : GlueConfig::Mode::Matching;
        sc.glue = g;
    }

    if (j.contains("gauss_green")) {
        for (const auto& p : j["gauss_green"].value("polygons", json::array()))
            sc.gauss_green_polygons.push_back(p.get<std::string>());
        if (j["gauss_green"].contains("references"))
            for (const auto& [key, val] : j["gauss_green"]["references"].items())
                sc.gauss_green_references[key] = val.get<double>();
    }
    if (sc.gauss_green_polygons.empty())
        for (const auto& p : sc.polygons) sc.gauss_green_polygons.push_back(p.name);

    if (j.contains("variation_polygons"))
        for (const auto& p : j["variation_polygons"])
            sc.variation_polygons.push_back(p.get<std::string>());
    if (sc.variation_polygons.empty())
        for (const auto& p : sc.polygons) sc.variation_polygons.push_back(p.name);

    return sc;
}

TestFunction random_bump(const PolygonalDomain& dom, SplitMix64& rng) {
    const Vec2 lo = dom.lo(), hi = dom.hi();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec2 c;
        c.x = rng.uniform(lo.x + 0.15 * (hi.x - lo.x), hi.x - 0.15 * (hi.x - lo.x));
        double margin = std::min(c.x - lo.x, hi.x - c.x);
        if (dom.dim() == 2) {
            c.y = rng.uniform(lo.y + 0.15 * (hi.y - lo.y), hi.y - 0.15 * (hi.y - lo.y));
            margin = std::min({margin, c.y - lo.y, hi.y - c.y});
        }
        const double r = rng.uniform(0.3, 0.55) * margin;
        const double amp = rng.uniform(0.5, 2.0);
        if (r > 0.05 * (hi.x - lo.x)) {
            TestFunction tf = TestFunction::bump(c, r, dom.dim(), amp);
            if (tf.supported_inside(dom)) return tf;
        }
    }
    throw std::runtime_error("random bump generation failed");
}

namespace {

std::string phi_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "phi%02zu", i);
    return buf;
}

void add_row(RunResult& out, const std::string& name, double value, double reference,
             double residual, double tolerance) {
    CheckRow row{name, value, reference, residual, tolerance, residual <= tolerance};
    out.ok = out.ok && row.pass;
    out.rows.push_back(std::move(row));
}

double rel_scale(double a, double b) { return 1.0 + std::abs(a) + std::abs(b); }

} // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    RunResult out;
    const bool was_parallel = par::enabled();
    if (opt.serial) par::set_enabled(false);
    struct Restore {
        bool val;
        ~Restore() { par::set_enabled(val); }
    } restore{was_parallel};

    out.seed = opt.seed_override.value_or(sc.seed);

    std::vector<TestFunction> phis = sc.test_functions;
    if (sc.random_count > 0) {
        SplitMix64 rng(out.seed);
        for (std::size_t i = 0; i < sc.random_count; ++i)
            phis.push_back(random_bump(*sc.domain, rng));
    }

    const PiecewiseField& field = *sc.field;
    const PiecewiseBV& u = *sc.bv;
    auto enabled = [&](const std::string& c) {
        for (const auto& x : sc.checks)
            if (x == c) return true;
        return false;
    };

    const PairingResult pr = pairing_decomposition(field, u);
    const auto v = composite_field(field, u);

    std::unique_ptr<MollifiedPairing> mp;
    const bool want_routes = enabled("pairing-routes");
    const bool want_conv = enabled("convergence");
    if ((want_routes || want_conv) && !sc.eps_sequence.empty())
        mp = std::make_unique<MollifiedPairing>(field, u, sc.eps_sequence, opt.quad);

    if (want_routes) {
        for (std::size_t i = 0; i < phis.size(); ++i) {
            const auto& phi = phis[i];
            const double measure_val = pr.mu_total.apply(phi, opt.quad);
            const double div_val = pr.composite_div.apply(phi, opt.quad);
            const double oracle_val = oracle::weak_divergence(*sc.domain, v, phi, opt.oracle).value;
            add_row(out, "divergence_identity/" + phi_id(i), div_val, oracle_val,
                    std::abs(div_val - oracle_val) / rel_scale(div_val, oracle_val),
                    sc.tol("divergence_identity"));
            const double def_val = pairing_by_definition(field, u, phi, opt.quad);
            add_row(out, "route_definition/" + phi_id(i), def_val, measure_val,
                    std::abs(def_val - measure_val) / rel_scale(def_val, measure_val),
                    sc.tol("route_definition"));
            if (mp) {
                const MollifiedRoute route = mp->evaluate(phi);
                add_row(out, "route_mollified/" + phi_id(i), route.extrapolated, measure_val,
                        std::abs(route.extrapolated - measure_val) /
                            rel_scale(route.extrapolated, measure_val),
                        sc.tol("route_mollified"));
                if (want_conv && i < 3) {
                    for (std::size_t k = 0; k < route.eps.size(); ++k)
                        out.convergence.push_back({"route_mollified/" + phi_id(i),
                                                   route.eps[k], route.values[k],
                                                   route.extrapolated, route.fitted_order});
                }
            }
        }
    }

    if (enabled("mubdd")) {
        const HybridMeasure du = u.variation_measure();
        for (const auto& pname : sc.variation_polygons) {
            const auto& E = sc.polygon(pname);
            const double tv = pr.mu_total.total_variation(E, BorelSelection::Interior, opt.quad);
            const double bound =
                field.sup_norm() * du.evaluate_on(E, BorelSelection::Interior, opt.quad);
            add_row(out, "variation_bound/" + pname, tv, bound,
                    std::max(0.0, tv - bound), sc.tol("variation_bound"));
        }
    }

    if (enabled("lipF")) {
        const double T = field.t_max();
        double fmax = 0.0, lipF = 0.0;
        auto probe = [&](auto&& fval, auto&& Fval) {
            for (int a = 0; a < 10; ++a) {
                const double ta = -T + 2.0 * T * (a + 0.5) / 10.0;
                fmax = std::max(fmax, std::abs(fval(ta)));
                for (int b = a + 1; b < 10; ++b) {
                    const double tb = -T + 2.0 * T * (b + 0.5) / 10.0;
                    lipF = std::max(lipF, std::abs(Fval(ta) - Fval(tb)) / std::abs(ta - tb));
                }
            }
        };
        const auto& dom = *sc.domain;
        for (std::size_t c = 0; c < dom.cell_count(); ++c) {
            for (int i = 0; i < 10; ++i) {
                Vec2 x;
                if (dom.dim() == 1) {
                    const auto& iv = dom.cells_1d()[c];
                    x = {iv.a + (iv.b - iv.a) * (i + 0.5) / 10.0, 0.0};
                } else {
                    const Vec2 cen = dom.cells_2d()[c].centroid();
                    const Vec2 v0 = dom.cells_2d()[c].v[0];
                    x = cen + (v0 - cen) * ((i + 0.5) / 10.0 * 0.9);
                }
                if (field.sigma_cell_density(int(c), x) <= 1e-14) continue;
                probe([&](double t) { return field.f_cell(int(c), x, t); },
                      [&](double t) { return field.F_cell(int(c), x, t); });
            }
        }
        const auto& skel = dom.skeleton();
        for (std::size_t e = 0; e < skel.size(); ++e) {
            const double len = (skel[e].p1 - skel[e].p0).norm();
            for (int i = 0; i < 10; ++i) {
                const double s = len < kGeomTol ? 0.0 : len * (i + 0.5) / 10.0;
                if (field.sigma_edge_density(int(e), s) <= 1e-14) continue;
                probe([&](double t) { return field.f_edge(int(e), s, t); },
                      [&](double t) { return field.F_edge(int(e), s, t); });
            }
        }
        add_row(out, "density_bound_f", fmax, 1.0, std::max(0.0, fmax - 1.0),
                sc.tol("field_inequalities"));
        add_row(out, "potential_lipschitz_F", lipF, 1.0, std::max(0.0, lipF - 1.0),
                sc.tol("field_inequalities"));
        if (!skel.empty()) {
            std::vector<int> all_edges;
            for (std::size_t e = 0; e < skel.size(); ++e) all_edges.push_back(int(e));
            const TracePair tp(&field, all_edges);
            const double lip = tp.lipschitz_bound();
            add_row(out, "trace_lipschitz", lip, field.sup_norm(),
                    std::max(0.0, lip - field.sup_norm()), sc.tol("field_inequalities"));
        }
    }

    if (enabled("traces") && !sc.domain->skeleton().empty()) {
        const auto& skel = sc.domain->skeleton();
        std::vector<std::pair<int, double>> samples;
        const std::size_t want = 5;
        for (std::size_t e = 0; e < skel.size() && samples.size() < 2 * want; ++e) {
            const double len = (skel[e].p1 - skel[e].p0).norm();
            if (len < kGeomTol) {
                samples.push_back({int(e), 0.0});
            } else {
                samples.push_back({int(e), 0.37 * len});
                if (skel.size() < 3) samples.push_back({int(e), 0.61 * len});
            }
        }
        if (samples.size() > 2 * want) samples.resize(2 * want);
        int idx = 0;
        for (const auto& [e, s] : samples) {
            const auto& ed = skel[std::size_t(e)];
            const Vec2 x = ed.point_at(s);
            const double len = (ed.p1 - ed.p0).norm();
            double r0 = 0.2 * std::max(1e-3, len < kGeomTol ? 1.0 : std::min(s, len - s));
            r0 = std::min(r0, 0.24 * std::min({x.x - sc.domain->lo().x,
                                               sc.domain->hi().x - x.x}));
            if (sc.domain->dim() == 2)
                r0 = std::min(r0, 0.24 * std::min(x.y - sc.domain->lo().y,
                                                  sc.domain->hi().y - x.y));
            for (bool plus : {false, true}) {
                const double tr = composite_trace(field, u, e, plus, s);
                const auto study =
                    oracle::one_sided_flux(*sc.domain, v, x, ed.nu, plus, r0, 0.5, 5);
                add_row(out,
                        std::string("trace_vs_flux/") + (plus ? "plus" : "minus") + "@" +
                            std::to_string(idx),
                        tr, study.extrapolated,
                        std::abs(tr - study.extrapolated) / rel_scale(tr, study.extrapolated),
                        sc.tol("trace_flux"));
            }
            const double jump = composite_trace(field, u, e, true, s) -
                                composite_trace(field, u, e, false, s);
            const double div_density = pr.composite_div.edge_density(std::size_t(e), s);
            add_row(out, "trace_jump_identity/@" + std::to_string(idx), jump, div_density,
                    std::abs(jump - div_density) / rel_scale(jump, div_density),
                    sc.tol("trace_jump"));
            ++idx;
        }
    }

    if (enabled("gauss-green")) {
        for (const auto& pname : sc.gauss_green_polygons) {
            const auto& E = sc.polygon(pname);
            const BalanceReport rep = gauss_green(field, u, E, opt.quad);
            const bool closed = sc.gauss_green_references.count(pname) > 0;
            const double tol = closed ? sc.tol("gauss_green") : sc.tol("gauss_green_quadrature");
            add_row(out, "green_interior/" + pname, rep.lhs_interior, rep.rhs_interior,
                    std::abs(rep.residual_interior()) /
                        rel_scale(rep.lhs_interior, rep.rhs_interior),
                    tol);
            add_row(out, "green_closure/" + pname, rep.lhs_closure, rep.rhs_closure,
                    std::abs(rep.residual_closure()) /
                        rel_scale(rep.lhs_closure, rep.rhs_closure),
                    tol);
            const BalanceReport wrep = gauss_green_weakly_regular(field, u, E, opt.quad);
            add_row(out, "green_weak/" + pname, wrep.lhs_interior, wrep.rhs_interior,
                    std::abs(wrep.residual_interior()) /
                        rel_scale(wrep.lhs_interior, wrep.rhs_interior),
                    tol);
            const double diff_lhs = rep.lhs_closure - rep.lhs_interior;
            add_row(out, "green_boundary_consistency/" + pname, diff_lhs, rep.interface_flux,
                    std::abs(diff_lhs - rep.interface_flux) /
                        rel_scale(diff_lhs, rep.interface_flux),
                    sc.tol("gauss_green"));
            if (closed) {
                const double ref = sc.gauss_green_references.at(pname);
                add_row(out, "green_reference/" + pname, rep.lhs_interior, ref,
                        std::abs(rep.lhs_interior - ref) / rel_scale(rep.lhs_interior, ref),
                        sc.tol("gauss_green"));
            }
        }
    }

    if (enabled("gluing") && sc.glue) {
        const auto& U = sc.polygon(sc.glue->polygon);
        if (sc.glue->mode == GlueConfig::Mode::Matching) {
            const GluedDivergence g = glue(field, u, field, u, U, opt.quad);
            for (std::size_t i = 0; i < phis.size(); ++i) {
                const double glued = g.apply(phis[i]);
                const double global = pr.composite_div.apply(phis[i], opt.quad);
                add_row(out, "glue_matching/" + phi_id(i), glued, global,
                        std::abs(glued - global) / rel_scale(glued, global), sc.tol("glue"));
            }
        } else {
            std::vector<std::vector<Poly>> zero(sc.domain->cell_count());
            const PiecewiseField zfield(sc.domain, zero, field.t_max());
            const PiecewiseBV zu(sc.domain, {});
            const GluedDivergence g = glue(field, u, zfield, zu, U, opt.quad);
            for (std::size_t i = 0; i < phis.size(); ++i) {
                const double glued = g.apply(phis[i]);
                const double ref = oracle::weak_divergence(*sc.domain, g.v, phis[i],
                                                           opt.oracle)
                                       .value;
                add_row(out, "glue_zero_extension/" + phi_id(i), glued, ref,
                        std::abs(glued - ref) / rel_scale(glued, ref), sc.tol("glue_oracle"));
            }
        }
    }

    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_report_csv(const std::string& path, const RunResult& result,
                      const std::string& scenario_name) {
    std::ofstream os(path);
    os << "# scenario," << scenario_name << "\n";
    os << "# seed," << result.seed << "\n";
    os << "name,value,reference,residual,tolerance,pass\n";
    for (const auto& r : result.rows)
        os << r.name << ',' << format_double(r.value) << ',' << format_double(r.reference)
           << ',' << format_double(r.residual) << ',' << format_double(r.tolerance) << ','
           << (r.pass ? "pass" : "fail") << "\n";
}

void write_convergence_csv(const std::string& path, const RunResult& result) {
    std::ofstream os(path);
    os << "check,parameter,value,extrapolated,order\n";
    for (const auto& r : result.convergence)
        os << r.check << ',' << format_double(r.parameter) << ',' << format_double(r.value)
           << ',' << format_double(r.extrapolated) << ',' << format_double(r.order) << "\n";
}

} // namespace dmpair
