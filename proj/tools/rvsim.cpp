// Command-line front end: single runs, multi-core sweeps, standalone branch-
// predictor evaluation, golden-stream trace dumps, and the kernel catalog.
//
// Exit codes: 0 success, 1 simulation/input error, 2 configuration error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rvsim/report.hpp"

namespace {

using namespace rvsim;

int exit_code_of(const SimError& e) {
    return (e.code() == ErrCode::ConfigError || e.code() == ErrCode::ParameterOutOfRange) ? 2
                                                                                          : 1;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_text_file(out_path, text);
}

CoreConfig load_core(const std::string& preset, const std::string& config_path) {
    ConfigSections sections;
    if (!config_path.empty()) sections = parse_config_path(config_path);
    return load_core_config(preset, sections);
}

KernelSpec make_kernel_spec(const std::string& name, u64 seed) {
    KernelSpec spec;
    spec.kind = kernel_kind_from_name(name);
    spec.seed = seed;
    return spec;
}

struct StreamInput {
    std::vector<RetireRecord> stream;
    std::string name;
    u64 bytes_copied = 0;
};

StreamInput load_stream(const std::string& kernel, const std::string& trace,
                        const std::string& program, u64 seed, u64 max_instrs) {
    int sources = int(!kernel.empty()) + int(!trace.empty()) + int(!program.empty());
    if (sources != 1)
        throw SimError(ErrCode::ConfigError,
                       "exactly one of --kernel, --trace, --program is required");
    StreamInput in;
    if (!kernel.empty()) {
        GeneratedKernel gk = generate(make_kernel_spec(kernel, seed));
        in.stream = golden_stream(gk, max_instrs);
        in.name = gk.name;
        in.bytes_copied = gk.bytes_copied;
    } else if (!trace.empty()) {
        in.stream = load_trace_file(trace);
        in.name = trace;
    } else {
        Program prog = load_flat_binary_file(program);
        RunResult rr = run(prog, max_instrs ? max_instrs : 100000000);
        if (rr.status == RunStatus::BudgetExceeded)
            throw SimError(ErrCode::InstructionBudgetExceeded, rr.diagnostic);
        if (rr.status == RunStatus::Fault)
            throw SimError(ErrCode::IllegalInstruction, rr.diagnostic);
        in.stream = std::move(rr.stream);
        in.name = program;
    }
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"configurable multi-core microarchitecture timing simulator"};
    app.require_subcommand(1);

    // Shared option storage.
    std::string core = "cva6";
    std::string config_path;
    std::string kernel;
    std::string trace;
    std::string program;
    std::string out_path;
    std::string format = "json";
    u64 seed = 1;
    u64 max_instrs = 0;

    // ---- run ----
    CLI::App* cmd_run = app.add_subcommand("run", "simulate one core over one workload");
    cmd_run->add_option("--core", core, "core preset (cva6, cva6s+, c910)");
    cmd_run->add_option("--config", config_path, "key = value config file with [preset] sections");
    cmd_run->add_option("--kernel", kernel, "built-in kernel name (see list-kernels)");
    cmd_run->add_option("--trace", trace, "externally captured instruction trace");
    cmd_run->add_option("--program", program, "flat-binary program file");
    cmd_run->add_option("--seed", seed, "kernel generator seed");
    cmd_run->add_option("--max-instrs", max_instrs, "golden-run instruction budget override");
    cmd_run->add_option("--out", out_path, "output path (default stdout)");
    cmd_run->add_option("--format", format, "json, csv, or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    // ---- sweep ----
    std::vector<std::string> sweep_cores = {"cva6", "cva6s+", "c910"};
    std::vector<std::string> sweep_kernels;
    int jobs = 0;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "simulate every (core, kernel) pair");
    cmd_sweep->add_option("--cores", sweep_cores, "core presets (default: all three)");
    cmd_sweep->add_option("--kernels", sweep_kernels, "kernel names (default: full catalog)");
    cmd_sweep->add_option("--config", config_path, "config file applied to every preset");
    cmd_sweep->add_option("--seed", seed, "kernel generator seed");
    cmd_sweep->add_option("--jobs", jobs, "worker threads (1 = serial reference)");
    cmd_sweep->add_option("--out", out_path, "output path (default stdout)");
    cmd_sweep->add_option("--format", format, "csv or table (default csv for sweep)");

    // ---- bp-eval ----
    std::string bp_trace;
    CLI::App* cmd_bp = app.add_subcommand(
        "bp-eval", "evaluate the direction predictors on a `pc T|N target` branch trace");
    cmd_bp->add_option("--trace", bp_trace, "branch-trace file")->required();
    cmd_bp->add_option("--core", core, "preset whose predictor geometry is used");
    cmd_bp->add_option("--config", config_path, "config file");
    cmd_bp->add_option("--out", out_path, "output path (default stdout)");

    // ---- trace-dump ----
    bool branch_trace_only = false;
    CLI::App* cmd_dump =
        app.add_subcommand("trace-dump", "run the golden model and write the committed stream");
    cmd_dump->add_option("--kernel", kernel, "built-in kernel name");
    cmd_dump->add_option("--program", program, "flat-binary program file");
    cmd_dump->add_option("--seed", seed, "kernel generator seed");
    cmd_dump->add_option("--max-instrs", max_instrs, "instruction budget override");
    cmd_dump->add_option("--out", out_path, "output path (default stdout)");
    cmd_dump->add_flag("--branch-trace", branch_trace_only,
                       "emit only control transfers in `pc T|N target` form");

    // ---- list-kernels ----
    CLI::App* cmd_list = app.add_subcommand("list-kernels", "print the kernel catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        if (cmd_list->parsed()) {
            for (const auto& name : kernel_names()) std::cout << name << "\n";
            return 0;
        }

        if (cmd_run->parsed()) {
            CoreConfig cfg = load_core(core, config_path);
            StreamInput in = load_stream(kernel, trace, program, seed, max_instrs);
            RunMetrics m = run_core(cfg, in.stream, in.name, in.bytes_copied);
            EnergyBreakdown e = estimate_energy(m, EnergyWeights{});
            if (format == "json") {
                emit(metrics_to_json(m, e), out_path);
            } else if (format == "csv") {
                emit(csv_header() + "\n" + csv_row(m, e) + "\n", out_path);
            } else {
                emit(metrics_table({SweepRow{m, e, 0.0}}), out_path);
            }
            return 0;
        }

        if (cmd_sweep->parsed()) {
            ConfigSections sections;
            if (!config_path.empty()) sections = parse_config_path(config_path);
            std::vector<CoreConfig> cores;
            for (const auto& name : sweep_cores) cores.push_back(load_core_config(name, sections));
            if (sweep_kernels.empty()) sweep_kernels = kernel_names();
            std::vector<KernelSpec> specs;
            for (const auto& name : sweep_kernels) specs.push_back(make_kernel_spec(name, seed));
            SweepResult res = run_sweep(cores, specs, jobs);
            std::string text = (cmd_sweep->count("--format") && format == "table")
                                   ? metrics_table(res.rows)
                                   : sweep_csv(res);
            emit(text, out_path);
            return 0;
        }

        if (cmd_bp->parsed()) {
            CoreConfig cfg = load_core(core, config_path);
            std::vector<BranchTraceRecord> recs = parse_branch_trace(read_text_file(bp_trace));
            std::string out = "predictor  entries  mispredict_rate\n";
            char buf[96];
            {
                BimodalBht p(cfg.predictor.bht_entries);
                double r = mispredict_rate(recs, p);
                std::snprintf(buf, sizeof buf, "bimodal    %7u  %.6f\n",
                              cfg.predictor.bht_entries, r);
                out += buf;
            }
            {
                TwoLevelBht p(cfg.predictor.bht_entries, cfg.predictor.history_bits);
                double r = mispredict_rate(recs, p);
                std::snprintf(buf, sizeof buf, "two_level  %7u  %.6f\n",
                              cfg.predictor.bht_entries, r);
                out += buf;
            }
            {
                HybridBht p(cfg.predictor.global_history_bits, cfg.predictor.local_entries,
                            cfg.predictor.local_history_bits, cfg.predictor.chooser_entries);
                double r = mispredict_rate(recs, p);
                std::snprintf(buf, sizeof buf, "hybrid     %7u  %.6f\n",
                              1u << cfg.predictor.global_history_bits, r);
                out += buf;
            }
            emit(out, out_path);
            return 0;
        }

        if (cmd_dump->parsed()) {
            if (kernel.empty() == program.empty())
                throw SimError(ErrCode::ConfigError,
                               "trace-dump needs exactly one of --kernel, --program");
            StreamInput in = load_stream(kernel, "", program, seed, max_instrs);
            std::string text = branch_trace_only
                                   ? format_branch_trace(branch_trace_of(in.stream))
                                   : dump_trace(in.stream);
            emit(text, out_path);
            return 0;
        }
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_of(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
