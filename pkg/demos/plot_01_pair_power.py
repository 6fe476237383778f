"""
One full-duplex pair: channel draw and transmit powers
======================================================

Draw a single UL/DL user pair around the base station, then look at how
the weighted pair rate changes as one of the two powers moves while the
other stays at its cap.
"""

import numpy as np

from fdpair import ScenarioConfig, build_instance, place_users
from fdpair.channel import drop_rngs
from fdpair.power import optimize_pair_powers, pair_sinr

cfg = ScenarioConfig(num_ul=1, num_dl=1, num_channels=1, si_cancellation=-100.0)
rng, _ = drop_rngs(seed=3, drop_index=0)
pos = place_users(cfg, rng)
inst = build_instance(cfg, pos, rng)

print("UL user at %.1f m, DL user at %.1f m" % tuple(np.hypot(pos[:, 0], pos[:, 1])))
print("gains (dB): UL %.1f  DL %.1f  UE-to-UE %.1f"
      % tuple(10 * np.log10([inst.g_ul[0], inst.g_dl[0], inst.g_cross[0, 0]])))

###############################################################################
# The optimizer only searches the two max-power edges of the power box.

sol = optimize_pair_powers(inst, 0, 0)
print(f"\nbest powers: UL {sol.p_ul * 1e3:.2f} mW, DL {sol.p_dl * 1e3:.2f} mW")
print(f"SINR (dB): UL {10 * np.log10(sol.sinr_ul):.1f}, DL {10 * np.log10(sol.sinr_dl):.1f}")
print(f"feasible: {sol.feasible}, weighted benefit {sol.benefit:.4g}")

###############################################################################
# Sweep the DL power with the UL user at full power. More DL power helps the
# DL user but leaks into the BS receiver as residual self-interference.

for frac in (1e-4, 1e-3, 1e-2, 1e-1, 1.0):
    p_dl = frac * inst.p_max_dl
    s_ul, s_dl = pair_sinr(inst.p_max_ul, p_dl, inst, 0, 0)
    se = np.log2(1 + s_ul) + np.log2(1 + s_dl)
    print(f"p_dl = {frac:>6g} x cap: UL {np.log2(1 + s_ul):5.2f}  DL {np.log2(1 + s_dl):5.2f}  sum {se:5.2f} b/s/Hz")
