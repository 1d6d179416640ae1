#pragma once

// CSV datasets, text summaries and atomic file output.

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "modelock/continuation.hpp"
#include "modelock/cycles.hpp"
#include "modelock/dynamics.hpp"
#include "modelock/manifold.hpp"

namespace modelock {

/// Shortest round-trip decimal form of `v`.
std::string format_double(double v);

/// "name=value;name=value" in schema order.
std::string format_params(const ParamSet& params);

/// One row per cycle:
///   map,params,period,symbols,residual,re1,im1,re2,im2,re3,im3,points
/// where `points` is "x y z|x y z|..." in iteration order.
void write_cycles_csv(std::ostream& os, std::span<const Cycle> cycles);

/// One row per record: <param>,period,residual,re1,im1,re2,im2,re3,im3,x0,y0,z0,x1,...
void write_branch_csv(std::ostream& os, const ContinuationBranch& branch);

/// kind,param,lo,hi,cycle_tag,period,critical_re,critical_im,nondegenerate,degraded
void write_events_csv(std::ostream& os, std::span<const BifurcationEvent> events);

/// branch,point,direction,index,x,y,z  (branch id "<point><+|->")
void write_manifold_csv(std::ostream& os, std::span<const ManifoldCurve> curves);

/// <param>,index,x,y,z
void write_scan_csv(std::ostream& os, const ScanResult& scan);

/// Structured "key: value" summaries.
std::string summarize(const Cycle& cycle);
std::string summarize(const ConnectionReport& report);
std::string summarize(const LoopCensus& census);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace modelock
