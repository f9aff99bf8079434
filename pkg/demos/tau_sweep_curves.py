"""Spectral efficiency versus pilot length for every receiver.

Sweeps the pilot length tau at a fixed load and SNR and prints the
resulting curves side by side. The joint receiver peaks at tau = 0 or 1
(it re-estimates the channel from already-decoded symbols), while the
separated receivers trade pilot overhead against estimation quality and
peak at an interior tau.

Run:  python demos/tau_sweep_curves.py
"""

import replica_cdma as rc

BETA = 0.5
SNR_DB = 6.0
TC = 20

receivers = [
    rc.ReceiverKind.LMMSE,
    rc.ReceiverKind.OPTIMUM_SEPARATED,
    rc.ReceiverKind.ONE_SHOT_CE_MUDD,
    rc.ReceiverKind.JOINT_CE_MUDD,
    rc.ReceiverKind.PERFECT_CSI_BOUND,
]

print(f"load beta={BETA}, P/N0={SNR_DB} dB, M=N=1, Tc={TC}")
print(f"{'tau':>4} {'tau/Tc':>7} " + " ".join(f"{r.value:>12}" for r in receivers))
base = rc.SystemConfig.from_snr_db(beta=BETA, m=1, n=1, snr_db=SNR_DB, tc=TC, tau=0)
for tau in range(TC + 1):
    cfg = base.with_tau(tau)
    row = [rc.spectral_efficiency(cfg, r) for r in receivers]
    print(f"{tau:>4} {tau / TC:>7.2f} " + " ".join(f"{v:>12.4f}" for v in row))

print()
for r in receivers:
    tau_opt, se = rc.optimize_tau(base, r)
    print(f"{r.value:>12}: best tau = {tau_opt:2d} ({tau_opt / TC:.2f} of the block), {se:.4f} bits/chip")
