from gamelogic.atm.compiler import (
    compile_apspace,
    compile_kexpspace,
    gen_alpha_build,
    gen_chi_enc,
    gen_chi_succ,
    gen_transition_block,
    small_model_table,
)
from gamelogic.atm.layout import (
    CellGeometry,
    CompilationLayout,
    apspace_layout,
    kexpspace_layout,
)
from gamelogic.atm.machines import always_accept, always_reject, builtin, even_ones
from gamelogic.atm.simulate import reference_cells, simulate
from gamelogic.atm.types import (
    Atm,
    Direction,
    SmallModelTable,
    StateKind,
    Transition,
    parse_machine,
    small_threshold,
)

__all__ = [
    "Atm",
    "CellGeometry",
    "CompilationLayout",
    "Direction",
    "SmallModelTable",
    "StateKind",
    "Transition",
    "always_accept",
    "always_reject",
    "apspace_layout",
    "builtin",
    "compile_apspace",
    "compile_kexpspace",
    "even_ones",
    "gen_alpha_build",
    "gen_chi_enc",
    "gen_chi_succ",
    "gen_transition_block",
    "kexpspace_layout",
    "parse_machine",
    "reference_cells",
    "simulate",
    "small_model_table",
    "small_threshold",
]
