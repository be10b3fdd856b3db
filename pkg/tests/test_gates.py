import itertools
import json

import pytest
from hypothesis import given, strategies as st

from mvadder.gates import (
    DIAMETER_NM,
    CellLibrary,
    ElectricalParams,
    LibraryError,
    NonFunctionalGateError,
    TransistorInventory,
    eval_primitive,
    inventory_area,
    load_library,
    propagation_delay,
    switching_energy,
)
from mvadder.levels import DomainError, Level, binary_full

X = Level.X
L = Level


# --------------------------------------------------------------------------
# Diameter table and inventories


def test_diameter_table_values():
    assert DIAMETER_NM == {
        8: 0.626, 10: 0.783, 13: 1.017, 19: 1.487, 29: 2.270, 37: 2.896,
    }


def test_diameter_linearity_half_percent():
    for n, d in DIAMETER_NM.items():
        assert abs(d / n - 0.0783) / 0.0783 < 0.005


def test_inventory_area_examples():
    assert inventory_area(TransistorInventory((("N", 19, 2),))) == pytest.approx(2.974)
    assert inventory_area(
        TransistorInventory((("N", 8, 1), ("P", 37, 1)))
    ) == pytest.approx(3.522)
    assert inventory_area(TransistorInventory(())) == 0.0


def test_inventory_area_unknown_chirality():
    with pytest.raises(LibraryError):
        inventory_area(TransistorInventory((("N", 12, 1),)))


def test_inventory_rejects_bad_entries():
    with pytest.raises(LibraryError):
        TransistorInventory((("Q", 19, 1),))
    with pytest.raises(LibraryError):
        TransistorInventory((("N", 19, 0),))


_entry = st.tuples(st.sampled_from("NP"), st.sampled_from(sorted(DIAMETER_NM)),
                   st.integers(min_value=1, max_value=10))


@given(st.lists(_entry, max_size=6), st.lists(_entry, max_size=6))
def test_inventory_area_additive(e1, e2):
    a = TransistorInventory(tuple(e1))
    b = TransistorInventory(tuple(e2))
    assert inventory_area(a + b) == pytest.approx(inventory_area(a) + inventory_area(b))
    assert (a + b).total_count == a.total_count + b.total_count


# --------------------------------------------------------------------------
# Logic evaluation


def test_threshold_detectors_step_functions():
    for k in (1, 2, 3):
        for v in range(4):
            low, ge = eval_primitive(f"det{k}", [L(v)])
            assert int(low) == (1 if v < k else 0)
            assert int(ge) == 1 - int(low)
    assert eval_primitive("det2", [L.L3]) == (L.L0, L.L1)
    assert eval_primitive("det1", [X]) == (X, X)


def test_succ_circuits():
    assert eval_primitive("succ3", [L.L2]) == (L.L1,)
    for k in (1, 2, 3):
        for v in range(4):
            assert int(eval_primitive(f"succ{k}", [L(v)])[0]) == (v + k) % 4
    assert eval_primitive("succ1", [X]) == (X,)


def test_succ_composition():
    # succ(j) then succ(k) == succ((j+k) mod 4) pointwise
    def succ(k, v):
        return ((v + k) % 4) if k else v

    for j in (1, 2, 3):
        for k in (1, 2, 3):
            for v in range(4):
                via_two = eval_primitive(f"succ{k}", eval_primitive(f"succ{j}", [L(v)]))
                jk = (j + k) % 4
                direct = L(succ(jk, v)) if jk else L(v)
                assert via_two[0] == direct


def test_mux4_is_table_lookup_exhaustive():
    # all 4^5 data/select combinations
    for combo in itertools.product(range(4), repeat=5):
        d0, d1, d2, d3, sel = combo
        out = eval_primitive("mux4", [L(d0), L(d1), L(d2), L(d3), L(sel)])
        assert int(out[0]) == combo[sel]


def test_mux_x_rules():
    # X on an unselected data input does not poison the output
    assert eval_primitive("mux4", [L.L1, X, X, X, L.L0]) == (L.L1,)
    assert eval_primitive("mux4", [X, L.L2, X, X, L.L1]) == (L.L2,)
    # X select poisons
    assert eval_primitive("mux4", [L.L0, L.L0, L.L0, L.L0, X]) == (X,)
    assert eval_primitive("mux2", [L.L1, X, L.L0]) == (L.L1,)
    assert eval_primitive("mux2", [X, L.L1, L.L1]) == (L.L1,)
    assert eval_primitive("mux2", [L.L0, L.L1, X]) == (X,)
    # selected X passes through
    assert eval_primitive("mux2", [X, L.L1, L.L0]) == (X,)


def test_mux2_example_carry_selection():
    # intermediate carries (cout0=0, cout1=1) muxed by cin=1 -> 1
    assert eval_primitive("mux2", [L.L0, L.L1, L.L1]) == (L.L1,)


def test_inv_buf_and_double_inversion():
    for v in (0, 1):
        inv = eval_primitive("inv", [L(v)])
        assert int(inv[0]) == 1 - v
        assert eval_primitive("inv", inv)[0] == L(v)
        assert eval_primitive("buf", [L(v)]) == (L(v),)
    assert eval_primitive("inv", [X]) == (X,)
    with pytest.raises(DomainError):
        eval_primitive("inv", [L.L2])


def test_binary_gate_semantics_with_x():
    assert eval_primitive("nand", [L.L0, X]) == (L.L1,)
    assert eval_primitive("nand", [L.L1, X]) == (X,)
    assert eval_primitive("nand", [L.L1, L.L1]) == (L.L0,)
    assert eval_primitive("nor", [L.L1, X]) == (L.L0,)
    assert eval_primitive("nor", [L.L0, X]) == (X,)
    assert eval_primitive("nor", [L.L0, L.L0]) == (L.L1,)
    assert eval_primitive("maj3", [L.L1, L.L1, X]) == (L.L1,)
    assert eval_primitive("maj3", [L.L0, X, L.L0]) == (L.L0,)
    assert eval_primitive("maj3", [L.L1, L.L0, X]) == (X,)
    assert eval_primitive("xor_tg", [L.L1, L.L0]) == (L.L1, L.L0)
    assert eval_primitive("xor_tg", [L.L1, X]) == (X, X)


def test_eval_arity_errors():
    with pytest.raises(DomainError):
        eval_primitive("mux4", [L.L0, L.L0])
    with pytest.raises(DomainError):
        eval_primitive("nosuch", [L.L0])


# --------------------------------------------------------------------------
# Electrical model


def _prim(kind="inv", supply=0.9, r=10e3, tint=1e-12, vth=0.2):
    lib = CellLibrary.default()
    p = lib.make_primitive(kind, supply, binary_full(max(supply, 0.9)))
    params = ElectricalParams(
        supply_voltage=supply,
        input_cap_per_pin=p.params.input_cap_per_pin,
        drive_resistance_ref=r,
        intrinsic_delay=tint,
        threshold_voltage=vth,
        output_encoding=p.params.output_encoding,
    )
    from mvadder.gates import GatePrimitive

    return GatePrimitive(kind, params, p.inventory)


def test_propagation_delay_examples():
    # R_eff at 0.9 V equals R_ref: 1 ps + 10 kOhm * 2 fF = 21 ps
    assert propagation_delay(_prim(supply=0.9), 2e-15) == pytest.approx(21e-12)
    # at 0.3 V supply R_eff = 10k * 0.7/0.1 = 70 kOhm: 141 ps
    assert propagation_delay(_prim(supply=0.3), 2e-15) == pytest.approx(141e-12)
    # zero load leaves the intrinsic delay
    assert propagation_delay(_prim(), 0.0) == pytest.approx(1e-12)


def test_propagation_delay_monotonicity():
    g = _prim(supply=0.9)
    d1 = propagation_delay(g, 1e-15)
    d2 = propagation_delay(g, 2e-15)
    d3 = propagation_delay(g, 3e-15)
    assert d1 < d2 < d3
    assert d3 - d2 == pytest.approx(d2 - d1)  # affine in load
    # strictly decreasing in supply above threshold
    delays = [propagation_delay(_prim(supply=v), 2e-15) for v in (0.3, 0.45, 0.9, 1.2)]
    assert all(a > b for a, b in zip(delays, delays[1:]))


def test_non_functional_gate():
    with pytest.raises(NonFunctionalGateError):
        propagation_delay(_prim(supply=0.15, vth=0.2), 1e-15)
    with pytest.raises(DomainError):
        propagation_delay(_prim(), -1e-15)


def test_switching_energy_examples():
    assert switching_energy(2e-15, 0.0, 0.9) == pytest.approx(0.81e-15)
    assert switching_energy(2e-15, 0.0, 0.3) == pytest.approx(0.09e-15)
    assert switching_energy(5e-15, 0.7, 0.7) == 0.0
    # symmetric in direction
    assert switching_energy(2e-15, 0.9, 0.0) == switching_energy(2e-15, 0.0, 0.9)
    with pytest.raises(DomainError):
        switching_energy(-1e-15, 0.0, 0.9)


def test_quadratic_swing_scaling():
    e_full = switching_energy(2e-15, 0.0, 0.9)
    e_half = switching_energy(2e-15, 0.0, 0.45)
    e_third = switching_energy(2e-15, 0.0, 0.3)
    assert e_half / e_full == pytest.approx(0.25)
    assert e_third / e_full == pytest.approx(1 / 9)


# --------------------------------------------------------------------------
# Cell library file


def test_default_library_covers_all_kinds():
    lib = CellLibrary.default()
    from mvadder.gates import KINDS

    assert set(lib.cells) == set(KINDS)


def test_default_inventory_transistor_counts():
    lib = CellLibrary.default()
    expected = {
        "inv": 2, "buf": 4, "nand": 4, "nor": 4, "xor_tg": 6, "maj3": 10,
        "mux2": 6, "mux4": 18,
        "det1": 6, "det2": 6, "det3": 6,
        "succ1": 8, "succ2": 8, "succ3": 8,
    }
    for kind, count in expected.items():
        assert lib.cells[kind].inventory.total_count == count, kind


def test_load_library_overrides(tmp_path):
    path = tmp_path / "lib.json"
    path.write_text(json.dumps({
        "inv": {"drive_resistance_ohm": 20e3, "inventory": [["N", 29, 1], ["P", 29, 1]]},
        "mux2": {"intrinsic_delay_s": 2e-12},
    }))
    lib = load_library(path)
    assert lib.cells["inv"].drive_resistance_ref == 20e3
    assert inventory_area(lib.cells["inv"].inventory) == pytest.approx(2 * 2.270)
    assert lib.cells["mux2"].intrinsic_delay == 2e-12
    # untouched kinds keep defaults
    assert lib.cells["mux4"].drive_resistance_ref == 10e3


def test_load_library_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad1.json"
    path.write_text(json.dumps({"inv": {"resistance": 1}}))
    with pytest.raises(LibraryError):
        load_library(path)
    path2 = tmp_path / "bad2.json"
    path2.write_text(json.dumps({"not_a_gate": {}}))
    with pytest.raises(LibraryError):
        load_library(path2)
    path3 = tmp_path / "bad3.json"
    path3.write_text(json.dumps({"inv": {"inventory": [["N", 12, 1]]}}))
    with pytest.raises(LibraryError):
        load_library(path3)
