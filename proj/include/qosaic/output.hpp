#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qosaic/scenario.hpp"
#include "qosaic/sim.hpp"
#include "qosaic/solver.hpp"

namespace qosaic {

inline constexpr const char* version_string = "1.0.0";

/// Column lists of every CSV the tools write. Consumers rely on these names
/// and orders; change them only together with a version bump.
const std::vector<std::string>& frame_csv_columns();
const std::vector<std::string>& frame_summary_csv_columns();
const std::vector<std::string>& ilm_csv_columns();
const std::vector<std::string>& sweep_flows_csv_columns();
const std::vector<std::string>& sweep_summary_csv_columns();
const std::vector<std::string>& trace_csv_columns();

std::string format_number(double value);

void write_csv_header(std::ostream& out, const std::vector<std::string>& columns);

void write_frames_csv(std::ostream& out, const Scenario& scenario, const RunResult& run);
void write_frame_summary_csv(std::ostream& out, const RunResult& run);
void write_ilm_csv(std::ostream& out, const RunResult& run);

/// One row per (load, seed, scheduler, flow).
void write_sweep_flow_rows(std::ostream& out, const Scenario& scenario, const SweepRun& run);

struct SweepSummaryRow {
    std::size_t load_index = 0; // 1-based
    double total_load_bps = 0.0;
    Scheduler scheduler = Scheduler::qosaic;
    std::size_t seeds = 0;
    double sum_output_bps = 0.0;
    double sensitive_output_bps = 0.0;
    double amended_be_bps = 0.0;
    double amended_rs_bps = 0.0;
    double amended_ds_bps = 0.0;
    double amended_ds_min_bps = 0.0;
    double amended_ds_max_bps = 0.0;
    double O_rbar_min_rs = 0.0;
    double O_dbar_max_ds = 0.0;
    double O_dbar_max_ds_max = 0.0;
    double O_rmin_all = 0.0;
};

/// Seed-averaged aggregates per (load, scheduler), ordered by load then scheduler.
std::vector<SweepSummaryRow> summarize_sweep(const Scenario& scenario, const std::vector<SweepRun>& runs);
void write_sweep_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows);

void write_trace_csv(std::ostream& out, const SolverTrace& trace);
void write_trace_jsonl(std::ostream& out, const SolverTrace& trace);

nlohmann::json make_manifest(const std::string& command, const Scenario& scenario,
                             const std::vector<std::string>& overrides, const std::vector<std::string>& files);

} // namespace qosaic
