#include "qosaic/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace qosaic {

using nlohmann::json;

const std::vector<std::string>& frame_csv_columns()
{
    static const std::vector<std::string> cols{
        "frame",     "flow",      "qos",    "arrivals_bits", "served_bps", "queue_bits", "rbar_bps",  "dbar_frames",
        "r_min_bps", "r_max_bps", "weight", "o_rmin",        "O_rmin",     "O_rbar_min", "O_dbar_max", "allocated_bps"};
    return cols;
}

const std::vector<std::string>& frame_summary_csv_columns()
{
    static const std::vector<std::string> cols{"frame",          "break_reason",      "converged",
                                               "solves",         "relaxations",       "capacity_skips",
                                               "first_solve_outer", "first_solve_converged", "objective"};
    return cols;
}

const std::vector<std::string>& ilm_csv_columns()
{
    static const std::vector<std::string> cols{"frame", "flow", "old_r_min_bps", "new_r_min_bps"};
    return cols;
}

const std::vector<std::string>& sweep_flows_csv_columns()
{
    static const std::vector<std::string> cols{
        "load_index",  "total_load_bps", "seed",       "scheduler", "flow",       "qos",      "mean_input_bps",
        "mean_output_bps", "residual_bps", "amended_bps", "O_rmin", "O_rbar_min", "O_dbar_max", "o_rmin"};
    return cols;
}

const std::vector<std::string>& sweep_summary_csv_columns()
{
    static const std::vector<std::string> cols{
        "load_index",        "total_load_bps",     "scheduler",      "seeds",          "sum_output_bps",
        "sensitive_output_bps", "amended_be_bps",  "amended_rs_bps", "amended_ds_bps", "amended_ds_min_bps",
        "amended_ds_max_bps", "O_rbar_min_rs",     "O_dbar_max_ds",  "O_dbar_max_ds_max", "O_rmin_all"};
    return cols;
}

const std::vector<std::string>& trace_csv_columns()
{
    static const std::vector<std::string> cols{"outer_iter", "primal", "dual", "gap",  "eps_outer",     "inner_iters",
                                               "int",        "phy1",   "phy2", "fmac", "original_fmac", "all",
                                               "break"};
    return cols;
}

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& columns)
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << columns[i];
    }
    out << '\n';
}

void write_frames_csv(std::ostream& out, const Scenario& scenario, const RunResult& run)
{
    write_csv_header(out, frame_csv_columns());
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
        for (std::size_t f = 0; f < run.frames[k].size(); ++f) {
            const FlowFrameRecord& r = run.frames[k][f];
            out << (k + 1) << ',' << f << ',' << to_string(scenario.flows[f].qos) << ','
                << format_number(r.arrivals_bits) << ',' << format_number(r.served_bps) << ','
                << format_number(r.queue_bits) << ',' << format_number(r.rbar_bps) << ','
                << format_number(r.dbar_frames) << ',' << format_number(r.r_min_bps) << ','
                << format_number(r.r_max_bps) << ',' << format_number(r.weight) << ',' << format_number(r.o_rmin)
                << ',' << format_number(r.O_rmin) << ',' << format_number(r.O_rbar_min) << ','
                << format_number(r.O_dbar_max) << ',' << format_number(r.allocated_bps) << '\n';
        }
    }
}

void write_frame_summary_csv(std::ostream& out, const RunResult& run)
{
    write_csv_header(out, frame_summary_csv_columns());
    for (const FrameSummary& s : run.summaries) {
        out << s.frame << ',' << to_string(s.break_reason) << ',' << int(s.converged) << ',' << s.solves << ','
            << s.relaxations << ',' << s.capacity_skips << ',' << s.first_solve_outer << ','
            << int(s.first_solve_converged) << ',' << format_number(s.objective) << '\n';
    }
}

void write_ilm_csv(std::ostream& out, const RunResult& run)
{
    write_csv_header(out, ilm_csv_columns());
    for (const IlmEvent& e : run.ilm_events) {
        out << e.frame << ',' << e.flow << ',' << format_number(e.old_r_min_bps) << ','
            << format_number(e.new_r_min_bps) << '\n';
    }
}

void write_sweep_flow_rows(std::ostream& out, const Scenario& scenario, const SweepRun& run)
{
    for (std::size_t f = 0; f < run.result.totals.size(); ++f) {
        const FlowTotals& t = run.result.totals[f];
        out << (run.load_index + 1) << ',' << format_number(run.total_load_bps) << ',' << run.result.seed << ','
            << to_string(run.result.scheduler) << ',' << f << ',' << to_string(scenario.flows[f].qos) << ','
            << format_number(t.mean_input_bps) << ',' << format_number(t.mean_output_bps) << ','
            << format_number(t.residual_bps) << ',' << format_number(t.amended_bps) << ','
            << format_number(t.mean_O_rmin) << ',' << format_number(t.mean_O_rbar_min) << ','
            << format_number(t.mean_O_dbar_max) << ',' << format_number(t.mean_o_rmin) << '\n';
    }
}

std::vector<SweepSummaryRow> summarize_sweep(const Scenario& scenario, const std::vector<SweepRun>& runs)
{
    struct Acc {
        SweepSummaryRow row;
        double ds_sum_outage = 0.0;
        std::size_t ds_count = 0;
        double rs_sum_outage = 0.0;
        std::size_t rs_count = 0;
        double all_sum_outage = 0.0;
        std::size_t all_count = 0;
    };
    std::map<std::pair<std::size_t, int>, Acc> groups;
    for (const SweepRun& run : runs) {
        Acc& acc = groups[{run.load_index, int(run.result.scheduler)}];
        SweepSummaryRow& row = acc.row;
        if (row.seeds == 0) {
            row.load_index = run.load_index + 1;
            row.total_load_bps = run.total_load_bps;
            row.scheduler = run.result.scheduler;
            row.amended_ds_min_bps = std::numeric_limits<double>::infinity();
            row.amended_ds_max_bps = -std::numeric_limits<double>::infinity();
        }
        ++row.seeds;
        double ds_amended = 0.0;
        for (std::size_t f = 0; f < run.result.totals.size(); ++f) {
            const FlowTotals& t = run.result.totals[f];
            const QosClass qos = scenario.flows[f].qos;
            row.sum_output_bps += t.mean_output_bps;
            acc.all_sum_outage += t.mean_O_rmin;
            ++acc.all_count;
            switch (qos) {
            case QosClass::best_effort:
                row.amended_be_bps += t.amended_bps;
                break;
            case QosClass::rate_sensitive:
                row.sensitive_output_bps += t.mean_output_bps;
                row.amended_rs_bps += t.amended_bps;
                acc.rs_sum_outage += t.mean_O_rbar_min;
                ++acc.rs_count;
                break;
            case QosClass::delay_sensitive:
                row.sensitive_output_bps += t.mean_output_bps;
                ds_amended += t.amended_bps;
                acc.ds_sum_outage += t.mean_O_dbar_max;
                row.O_dbar_max_ds_max = std::max(row.O_dbar_max_ds_max, t.mean_O_dbar_max);
                ++acc.ds_count;
                break;
            }
        }
        row.amended_ds_bps += ds_amended;
        row.amended_ds_min_bps = std::min(row.amended_ds_min_bps, ds_amended);
        row.amended_ds_max_bps = std::max(row.amended_ds_max_bps, ds_amended);
    }
    std::vector<SweepSummaryRow> rows;
    for (auto& [key, acc] : groups) {
        SweepSummaryRow row = acc.row;
        const double seeds = double(row.seeds);
        row.sum_output_bps /= seeds;
        row.sensitive_output_bps /= seeds;
        row.amended_be_bps /= seeds;
        row.amended_rs_bps /= seeds;
        row.amended_ds_bps /= seeds;
        row.O_rbar_min_rs = acc.rs_count ? acc.rs_sum_outage / double(acc.rs_count) : 0.0;
        row.O_dbar_max_ds = acc.ds_count ? acc.ds_sum_outage / double(acc.ds_count) : 0.0;
        row.O_rmin_all = acc.all_count ? acc.all_sum_outage / double(acc.all_count) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows)
{
    write_csv_header(out, sweep_summary_csv_columns());
    for (const SweepSummaryRow& r : rows) {
        out << r.load_index << ',' << format_number(r.total_load_bps) << ',' << to_string(r.scheduler) << ','
            << r.seeds << ',' << format_number(r.sum_output_bps) << ',' << format_number(r.sensitive_output_bps)
            << ',' << format_number(r.amended_be_bps) << ',' << format_number(r.amended_rs_bps) << ','
            << format_number(r.amended_ds_bps) << ',' << format_number(r.amended_ds_min_bps) << ','
            << format_number(r.amended_ds_max_bps) << ',' << format_number(r.O_rbar_min_rs) << ','
            << format_number(r.O_dbar_max_ds) << ',' << format_number(r.O_dbar_max_ds_max) << ','
            << format_number(r.O_rmin_all) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace)
{
    write_csv_header(out, trace_csv_columns());
    for (const TraceRecord& r : trace.records) {
        out << r.outer_iter << ',' << format_number(r.primal) << ',' << format_number(r.dual) << ','
            << format_number(r.gap) << ',' << format_number(r.eps_outer) << ',' << r.inner_iters << ','
            << int(r.flags.integer) << ',' << int(r.flags.phy1) << ',' << int(r.flags.phy2) << ','
            << int(r.flags.fmac) << ',' << int(r.original_fmac) << ',' << int(r.flags.all()) << ','
            << int(r.broke) << '\n';
    }
}

void write_trace_jsonl(std::ostream& out, const SolverTrace& trace)
{
    for (const TraceRecord& r : trace.records) {
        json j = {{"outer_iter", r.outer_iter},
                  {"primal", r.primal},
                  {"dual", r.dual},
                  {"gap", r.gap},
                  {"eps_outer", std::isnan(r.eps_outer) ? json(nullptr) : json(r.eps_outer)},
                  {"inner_iters", r.inner_iters},
                  {"flags",
                   {{"int", r.flags.integer},
                    {"phy1", r.flags.phy1},
                    {"phy2", r.flags.phy2},
                    {"fmac", r.flags.fmac},
                    {"original_fmac", r.original_fmac},
                    {"all", r.flags.all()}}},
                  {"break", r.broke}};
        out << j.dump() << '\n';
    }
}

json make_manifest(const std::string& command, const Scenario& scenario, const std::vector<std::string>& overrides,
                   const std::vector<std::string>& files)
{
    return {{"tool", "qosaic"},
            {"version", version_string},
            {"command", command},
            {"overrides", overrides},
            {"seeds", scenario.sim.seeds},
            {"files", files},
            {"scenario", to_json(scenario)}};
}

} // namespace qosaic
