"""Runtime counters -> time, energy, power, area, IPS, IPS/W.

Timelines are computed in integer MAC cycles (programming time is rounded
to whole cycles once) and converted to seconds at the end, so single- vs
dual-core comparisons and replay checks are exact.

Rate-specified electronics (ADC, TIA, thermal tuning, laser) are charged
only while a core is actively computing: per-inference energy is then
independent of core count, and the dual core buys latency, not efficiency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EvaluationError
from .photonics import LossBudget, loss_budget
from .workload import ChipConfig, RuntimeStats, network_runtime

ENERGY_CATEGORIES = (
    "dram",
    "sram",
    "odac",
    "adc",
    "tia",
    "serdes",
    "clocking",
    "laser",
    "pcm_programming",
    "thermal_tuning",
)

AREA_CATEGORIES = (
    "sram",
    "adc",
    "odac",
    "clocking",
    "photonic_array",
    "digital_overhead",
)


@dataclass(frozen=True)
class LayerSegment:
    name: str
    tiles: int
    cycles_per_tile: int
    compute_cycles: int
    exposed_prog_cycles: int


@dataclass(frozen=True)
class Timeline:
    """Where the wall-clock time of one batched network pass goes."""

    t_compute: float
    t_program_exposed: float
    t_total: float
    compute_cycles: int
    exposed_prog_cycles: int
    total_cycles: int
    prog_cycles_per_event: int
    segments: tuple[LayerSegment, ...]


def _prog_cycles(cfg: ChipConfig, tech) -> int:
    return round(tech.t_pcm_program * cfg.clock_hz)


def _tile_stream(stats: RuntimeStats) -> list[tuple[str, int, int]]:
    """(layer name, tile count, cycles per tile) in execution order."""
    return [(lr.layer.name, lr.tiles.programming_events, lr.tiles.vectors_per_tile)
            for lr in stats.layers]


def timeline_single_core(stats: RuntimeStats, cfg: ChipConfig, tech) -> Timeline:
    """One array: every reprogramming stalls compute."""
    if cfg.cores != 1:
        raise EvaluationError(f"single-core timeline asked for a {cfg.cores}-core config")
    return _timeline(stats, cfg, tech, dual=False)


def timeline_dual_core(stats: RuntimeStats, cfg: ChipConfig, tech) -> Timeline:
    """Two arrays ping-pong: tile i computes while tile i+1 is programmed.

    t_total = t_prog(first tile) + sum_i max(t_compute(i), t_prog(i+1)),
    with no programming after the last tile. Programming is fully hidden
    exactly when every tile computes for at least one programming time.
    """
    if cfg.cores != 2:
        raise EvaluationError(f"dual-core timeline asked for a {cfg.cores}-core config")
    return _timeline(stats, cfg, tech, dual=True)


def _timeline(stats: RuntimeStats, cfg: ChipConfig, tech, dual: bool) -> Timeline:
    p = _prog_cycles(cfg, tech)
    stream = _tile_stream(stats)
    n_tiles = sum(count for _, count, _ in stream)

    compute_total = 0
    total = 0
    segments: list[LayerSegment] = []
    if not dual:
        for name, count, cycles in stream:
            layer_compute = count * cycles
            compute_total += layer_compute
            total += count * (p + cycles)
            segments.append(LayerSegment(name, count, cycles, layer_compute, count * p))
    else:
        # Tile i overlaps with programming of tile i+1: each non-final tile
        # contributes max(c, p); the stream's final tile has nothing left to
        # hide and contributes bare compute. The head programming is never
        # hidden. Runs of identical tiles are collapsed.
        total = p if n_tiles else 0
        seen = 0
        for name, count, cycles in stream:
            layer_compute = count * cycles
            compute_total += layer_compute
            holds_final_tile = seen + count == n_tiles
            paired = count - 1 if holds_final_tile else count
            total += paired * max(cycles, p) + (cycles if holds_final_tile else 0)
            exposed = paired * max(p - cycles, 0)
            if seen == 0:
                exposed += p
            seen += count
            segments.append(LayerSegment(name, count, cycles, layer_compute, exposed))

    exposed_total = total - compute_total
    clk = cfg.clock_hz
    return Timeline(
        t_compute=compute_total / clk,
        t_program_exposed=exposed_total / clk,
        t_total=total / clk,
        compute_cycles=compute_total,
        exposed_prog_cycles=exposed_total,
        total_cycles=total,
        prog_cycles_per_event=p,
        segments=tuple(segments),
    )


def make_timeline(stats: RuntimeStats, cfg: ChipConfig, tech) -> Timeline:
    if cfg.cores == 2:
        return timeline_dual_core(stats, cfg, tech)
    return timeline_single_core(stats, cfg, tech)


def energy_model(stats: RuntimeStats, timeline: Timeline, cfg: ChipConfig, tech,
                 budget: LossBudget | None = None) -> dict[str, float]:
    """Per-category energy (J) for one batched network pass."""
    c = stats.total
    cycles = c.compute_cycles
    clk = cfg.clock_hz
    if budget is None:
        budget = loss_budget(cfg, tech)
    return {
        "dram": c.dram_bits * tech.e_dram_per_bit,
        "sram": c.sram_bits * tech.e_sram_per_bit,
        "odac": cycles * cfg.rows * tech.e_odac_driver,
        "adc": cycles * cfg.cols * (tech.p_adc / clk),
        "tia": cycles * cfg.cols * (tech.p_tia / clk),
        "serdes": cycles * (cfg.rows * cfg.b_in + cfg.cols * cfg.b_out) * tech.e_serdes_per_bit,
        "clocking": cycles * (cfg.rows + cfg.cols) * tech.e_clock_per_lane_cycle,
        "laser": timeline.t_compute * budget.laser_wallplug_power_w,
        "pcm_programming": c.cells_programmed * tech.e_pcm_program_per_cell,
        "thermal_tuning": cycles * cfg.rows * tech.rings_per_row_tx * (tech.p_thermal_per_ring / clk),
    }


def area_model(cfg: ChipConfig, tech) -> dict[str, float]:
    """Per-category chip area (mm^2)."""
    pitch_mm = tech.unit_cell_pitch_um / 1e3
    return {
        "sram": cfg.total_sram_mb * tech.a_sram_per_mb,
        "adc": cfg.cores * cfg.cols * tech.a_adc,
        "odac": cfg.cores * cfg.rows * tech.rings_per_row_tx * tech.a_odac,
        "clocking": cfg.cores * (cfg.rows + cfg.cols) * tech.a_clock_per_lane,
        "photonic_array": cfg.cores * (cfg.rows * pitch_mm) * (cfg.cols * pitch_mm),
        "digital_overhead": tech.a_digital_overhead,
    }


@dataclass(frozen=True)
class PerfReport:
    """Headline metrics plus the breakdowns they are built from."""

    ips: float
    ips_per_w: float
    power_w: float
    area_mm2: float
    energy_total_j: float
    energy_j: dict[str, float]
    power_by_w: dict[str, float]
    area_by_mm2: dict[str, float]
    timeline: Timeline
    stats: RuntimeStats
    budget: LossBudget

    def largest_energy_category(self) -> str:
        return max(self.energy_j, key=lambda k: self.energy_j[k])

    def largest_area_category(self) -> str:
        return max(self.area_by_mm2, key=lambda k: self.area_by_mm2[k])


def _check_breakdown(parts: dict[str, float], total: float, what: str) -> None:
    s = sum(parts.values())
    if not math.isclose(s, total, rel_tol=1e-9, abs_tol=1e-30):
        raise EvaluationError(f"{what} breakdown ({s}) does not sum to total ({total})")


def evaluate(layers, cfg: ChipConfig, tech) -> PerfReport:
    """Full pipeline: map the network, build the timeline, roll up metrics."""
    stats = network_runtime(layers, cfg)
    timeline = make_timeline(stats, cfg, tech)
    budget = loss_budget(cfg, tech)
    energy = energy_model(stats, timeline, cfg, tech, budget)
    area = area_model(cfg, tech)

    energy_total = sum(energy.values())
    t_total = timeline.t_total
    if t_total <= 0:
        raise EvaluationError("network produced a zero-length timeline")
    power = energy_total / t_total
    ips = cfg.batch / t_total
    area_total = sum(area.values())
    power_by = {k: v / t_total for k, v in energy.items()}

    _check_breakdown(energy, energy_total, "energy")
    _check_breakdown(power_by, power, "power")
    _check_breakdown(area, area_total, "area")

    return PerfReport(
        ips=ips,
        ips_per_w=ips / power,
        power_w=power,
        area_mm2=area_total,
        energy_total_j=energy_total,
        energy_j=energy,
        power_by_w=power_by,
        area_by_mm2=area,
        timeline=timeline,
        stats=stats,
        budget=budget,
    )


# Published reference point for context in reports; not a model input.
NVIDIA_A100_REFERENCE = {"ips": 29733, "ips_per_w": 75, "power_w": 396, "area_mm2": 826}
