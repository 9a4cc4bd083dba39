#include "qkh/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qkh/config.hpp"
#include "qkh/constants.hpp"
#include "qkh/effective.hpp"
#include "qkh/kernel.hpp"

namespace qkh::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
    ConfigTree tree;
    fs::path out;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    void write_text(const std::string& name, const std::string& content) {
        const fs::path path = out / name;
        std::ofstream file(path);
        if (!file) throw validation_error("cannot write " + path.string());
        file << content;
        outputs.push_back(name);
    }

    void write_manifest(const std::string& command, const json& extra = json::object()) {
        json manifest;
        manifest["code_version"] = code_version;
        manifest["command"] = command;
        manifest["config_hash"] = tree.content_hash();
        json resolved = json::object();
        for (const auto& [path, value] : tree.values()) {
            switch (value.kind) {
                case ConfigValue::Kind::string:
                    resolved[path] = value.str;
                    break;
                case ConfigValue::Kind::number:
                    resolved[path] = value.num;
                    break;
                case ConfigValue::Kind::boolean:
                    resolved[path] = value.flag;
                    break;
                case ConfigValue::Kind::number_array:
                    resolved[path] = value.array;
                    break;
            }
        }
        manifest["resolved_config"] = resolved;
        manifest["tolerances"] = {{"series_quadrature_rel_tol", series_quadrature_tol},
                                  {"taylor_remainder_per_step", taylor_remainder_tol},
                                  {"audit_max_phase_per_step", audit_max_phase_per_step}};
        manifest["outputs"] = outputs;
        manifest["warnings"] = warnings;
        for (const auto& [key, value] : extra.items()) manifest[key] = value;
        const fs::path path = out / "manifest.json";
        std::ofstream file(path);
        if (!file) throw validation_error("cannot write " + path.string());
        file << manifest.dump(2) << "\n";
    }
};

RunContext make_context(const RunOptions& options) {
    RunContext ctx;
    ctx.tree = ConfigTree::parse_file(options.config_path);
    for (const auto& assignment : options.overrides) ctx.tree.override_path(assignment);
    ctx.out = options.out_dir;
    fs::create_directories(ctx.out);
    return ctx;
}

CompositeState initial_state(const RunSettings& rs) {
    if (rs.frame == FrameKind::continuum)
        return prepare_continuum_state(rs.grid, *rs.bath, rs.particle, &rs.potential, rs.mass);
    const FockSpace fock(rs.n_cut);
    return prepare_state(rs.grid, fock, rs.particle, rs.oscillator, &rs.potential, rs.mass);
}

ObservableSeries run_frame(CompositeState& state, const RunSettings& rs) {
    switch (rs.frame) {
        case FrameKind::lab:
            return evolve_lab(state, rs.potential, rs.drive, rs.prop, rs.t0, rs.t1, rs.region);
        case FrameKind::final_frame:
            return evolve_final(state, rs.potential, rs.drive, rs.order, rs.prop, rs.t0, rs.t1,
                                rs.region);
        case FrameKind::continuum:
            return evolve_continuum(state, rs.potential, *rs.bath, rs.prop, rs.t0, rs.t1, rs.region);
    }
    throw validation_error("unknown frame");
}

}  // namespace

void run_simulate(const RunOptions& options) {
    RunContext ctx = make_context(options);
    const RunSettings rs = build_settings(ctx.tree);
    CompositeState state = initial_state(rs);
    if (rs.write_snapshots) {
        save_snapshot(state, (ctx.out / "initial.qkh").string());
        ctx.outputs.push_back("initial.qkh");
    }
    const ObservableSeries series = run_frame(state, rs);
    ctx.write_text("series.csv", series.to_csv());
    if (rs.write_snapshots) {
        save_snapshot(state, (ctx.out / "final.qkh").string());
        ctx.outputs.push_back("final.qkh");
    }
    ctx.warnings = series.warnings;
    ctx.write_manifest("simulate");
}

void run_compare_gauges(const RunOptions& options) {
    RunContext ctx = make_context(options);
    const RunSettings rs = build_settings(ctx.tree);
    if (rs.frame == FrameKind::continuum)
        throw validation_error("compare-gauges: single-mode frames only");
    const CompositeState initial = initial_state(rs);

    CompositeState lab = initial;
    const ObservableSeries lab_series =
        evolve_lab(lab, rs.potential, rs.drive, rs.prop, rs.t0, rs.t1, rs.region);
    ctx.write_text("lab_series.csv", lab_series.to_csv());

    CompositeState direct = initial;
    apply_interaction_picture(direct, rs.drive, rs.t0);
    const ObservableSeries final_series =
        evolve_final(direct, rs.potential, rs.drive, rs.order, rs.prop, rs.t0, rs.t1, rs.region);
    ctx.write_text("final_series.csv", final_series.to_csv());

    CompositeState chained = lab;
    apply_chain(chained, rs.drive, rs.order, rs.stage, rs.t0, rs.t1, U1Integrand::renormalized,
                rs.mass);
    const double fid_renorm = fidelity(chained, direct);

    CompositeState chained_bare = lab;
    apply_chain(chained_bare, rs.drive, rs.order, rs.stage, rs.t0, rs.t1, U1Integrand::bare,
                rs.mass);
    const double fid_bare = fidelity(chained_bare, direct);

    json report;
    report["order"] = rs.order;
    report["fidelity_renormalized_kick"] = fid_renorm;
    report["one_minus_fidelity_renormalized_kick"] = 1.0 - fid_renorm;
    report["fidelity_bare_kick"] = fid_bare;
    report["one_minus_fidelity_bare_kick"] = 1.0 - fid_bare;
    report["kick_variant_difference"] = std::abs(fid_renorm - fid_bare);
    ctx.write_text("fidelity_report.json", report.dump(2) + "\n");
    ctx.warnings = lab_series.warnings;
    ctx.write_manifest("compare-gauges");
}

void run_effective_field(const RunOptions& options) {
    RunContext ctx = make_context(options);
    const RunSettings rs = build_settings(ctx.tree);
    if (!rs.has_drive) throw validation_error("effective-field: needs a physics.drive block");

    const int n_times = 65;
    {
        const KernelTable table =
            tabulate_kernel(rs.drive, rs.drive.envelope.t_start, rs.t1, n_times);
        std::ostringstream csv;
        csv.precision(17);
        csv << "t_prime,t,im_f\n";
        for (int i = 0; i < n_times; ++i)
            for (int j = 0; j < n_times; ++j)
                csv << table.times[i] << ',' << table.times[j] << ','
                    << table.im_f[std::size_t(i) * n_times + j] << "\n";
        ctx.write_text("f_kernel.csv", csv.str());
    }
    {
        const EffectiveField order1(rs.drive, 1);
        const EffectiveField order2(rs.drive, 2);
        std::ostringstream csv;
        csv.precision(17);
        csv << "t,abs_order0,abs_delta_order1,abs_delta_order2\n";
        for (int i = 0; i < n_times; ++i) {
            const double t =
                rs.drive.envelope.t_start + (rs.t1 - rs.drive.envelope.t_start) * i / (n_times - 1);
            const cd c0 = alpha_i_ddot_coeff(rs.drive, t);
            const cd c1 = order1.acceleration_coeff(t);
            const cd c2 = order2.acceleration_coeff(t);
            csv << t << ',' << std::abs(c0) << ',' << std::abs(c1 - c0) << ',' << std::abs(c2 - c1)
                << "\n";
        }
        ctx.write_text("correction_norms.csv", csv.str());
    }
    {
        const EpsilonReport eps = epsilon_report(rs.mass, rs.drive.omega, rs.drive.ell);
        json report;
        report["epsilon"] = eps.epsilon;
        report["a_zp"] = eps.a_zp;
        report["ell"] = eps.ell;
        report["verdict"] = eps.verdict;
        ctx.write_text("epsilon_report.json", report.dump(2) + "\n");
    }
    ctx.write_manifest("effective-field");
}

void run_optomech_map(const RunOptions& options) {
    RunContext ctx = make_context(options);
    if (!ctx.tree.has("physics.optomech.mass_kg"))
        throw validation_error("optomech-map: needs a physics.optomech block");
    const OptomechParams params = build_optomech(ctx.tree);
    const QkhMapping mapping = map_to_qkh(params);
    const double duration = ctx.tree.get_number_or("physics.optomech.audit_duration_s", 1e-3);

    json report = json::parse(mapping.to_json());
    report["kerr_phase_bound_rad"] = kerr_phase_audit(params, duration);
    report["kerr_audit_duration_s"] = duration;
    report["epsilon_verdict"] = epsilon_report(1.0, 1.0, std::sqrt(mapping.epsilon)).verdict;
    ctx.write_text("mapping_report.json", report.dump(2) + "\n");
    ctx.write_manifest("optomech-map");
}

void run_sweep(const RunOptions& options) {
    RunContext ctx = make_context(options);
    const std::string path = ctx.tree.get_string("sweep.path");
    std::vector<double> values;
    if (ctx.tree.has("sweep.values")) {
        values = ctx.tree.get_array("sweep.values");
    } else {
        const double from = ctx.tree.get_number("sweep.log_from");
        const double to = ctx.tree.get_number("sweep.log_to");
        const int points = ctx.tree.get_int_or("sweep.points", 5);
        if (points < 2 || !(from > 0.0) || !(to > from))
            throw validation_error("sweep: need 0 < log_from < log_to and points >= 2");
        for (int i = 0; i < points; ++i)
            values.push_back(from * std::pow(to / from, double(i) / (points - 1)));
    }
    if (values.empty()) throw validation_error("sweep: empty value list");

    const int parallel = std::max(1, options.parallel);
    std::vector<std::string> point_errors(values.size());
    std::vector<ObservableSeries> results(values.size());

    auto run_point = [&](std::size_t index) {
        try {
            ConfigTree point_tree = ctx.tree;
            std::ostringstream assign;
            assign.precision(17);
            assign << path << "=" << values[index];
            point_tree.override_path(assign.str());
            const RunSettings rs = build_settings(point_tree);
            CompositeState state = initial_state(rs);
            results[index] = run_frame(state, rs);

            std::ostringstream dir;
            dir << "sweep_" << std::setw(3) << std::setfill('0') << index;
            fs::create_directories(ctx.out / dir.str());
            std::ofstream csv(ctx.out / dir.str() / "series.csv");
            csv << results[index].to_csv();
        } catch (const std::exception& e) {
            point_errors[index] = e.what();
        }
    };

    if (parallel == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) run_point(i);
    } else {
        std::vector<std::thread> workers;
        std::mutex next_mutex;
        std::size_t next = 0;
        for (int w = 0; w < parallel; ++w)
            workers.emplace_back([&] {
                while (true) {
                    std::size_t index;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= values.size()) return;
                        index = next++;
                    }
                    run_point(index);
                }
            });
        for (auto& w : workers) w.join();
    }

    for (std::size_t i = 0; i < values.size(); ++i)
        if (!point_errors[i].empty())
            throw validation_error("sweep point " + std::to_string(i) + " failed: " + point_errors[i]);

    std::ostringstream csv;
    csv.precision(17);
    csv << "index,value,final_t,final_norm,final_x_mean,final_escape,final_energy\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const ObservableSeries& s = results[i];
        const std::size_t last = s.size() - 1;
        csv << i << ',' << values[i] << ',' << s.t[last] << ',' << s.norm[last] << ','
            << s.x_mean[last] << ',' << s.escape[last] << ',' << s.energy[last] << "\n";
        std::ostringstream dir;
        dir << "sweep_" << std::setw(3) << std::setfill('0') << i;
        ctx.outputs.push_back(dir.str() + "/series.csv");
    }
    ctx.write_text("sweep_results.csv", csv.str());
    json extra;
    extra["sweep_path"] = path;
    extra["sweep_values"] = values;
    ctx.write_manifest("sweep", extra);
}

void run_bath_design(const RunOptions& options) {
    RunContext ctx = make_context(options);
    const RunSettings rs = build_settings(ctx.tree);
    if (!rs.bath) throw validation_error("bath-design: needs a physics.bath block");

    const PulseDesign pulse = pulse_from_wavepacket(*rs.bath, rs.t0, rs.t1);
    {
        std::ostringstream csv;
        csv.precision(17);
        csv << "t,alpha\n";
        for (std::size_t i = 0; i < pulse.times.size(); ++i)
            csv << pulse.times[i] << ',' << pulse.alpha[i] << "\n";
        ctx.write_text("pulse.csv", csv.str());
    }
    {
        const int n_times = 65;
        std::ostringstream csv;
        csv.precision(17);
        csv << "t_prime,t,im_f\n";
        for (int i = 0; i < n_times; ++i)
            for (int j = 0; j < n_times; ++j) {
                const double tp = rs.t0 + (rs.t1 - rs.t0) * i / (n_times - 1);
                const double t = rs.t0 + (rs.t1 - rs.t0) * j / (n_times - 1);
                csv << tp << ',' << t << ',' << f_kernel_continuum(*rs.bath, tp, t).imag() << "\n";
            }
        ctx.write_text("continuum_kernel.csv", csv.str());
    }
    json extra;
    extra["pulse_peak"] = pulse.peak;
    extra["modes"] = rs.bath->mode_count();
    ctx.write_manifest("bath-design", extra);
}

int dispatch(const std::string& command, const RunOptions& options) {
    try {
        if (command == "simulate")
            run_simulate(options);
        else if (command == "compare-gauges")
            run_compare_gauges(options);
        else if (command == "effective-field")
            run_effective_field(options);
        else if (command == "optomech-map")
            run_optomech_map(options);
        else if (command == "sweep")
            run_sweep(options);
        else if (command == "bath-design")
            run_bath_design(options);
        else {
            std::cerr << "unknown command: " << command << "\n";
            return 2;
        }
        return 0;
    } catch (const truncation_error& e) {
        std::cerr << "truncation-leakage error: " << e.what() << "\n";
        return 4;
    } catch (const stability_error& e) {
        std::cerr << "numerical-stability error: " << e.what() << "\n";
        return 3;
    } catch (const accuracy_error& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qkh::cli
