"""Optimal training overhead versus antenna count.

More transmit antennas mean more channel coefficients to learn, so the
receivers that rely purely on pilots spend a growing fraction of the
coherence block on training, approaching about half the block. The
joint receiver never needs more than one pilot period: decoded data
periods serve as virtual pilots for the following stages.

Run:  python demos/training_overhead.py
"""

import replica_cdma as rc

TC = 20
kinds = [
    rc.ReceiverKind.JOINT_CE_MUDD,
    rc.ReceiverKind.ONE_SHOT_CE_MUDD,
    rc.ReceiverKind.OPTIMUM_SEPARATED,
    rc.ReceiverKind.LMMSE,
]

print(f"beta=0.5, P/N0=6 dB, Tc={TC}: optimal tau/Tc")
print(f"{'M=N':>4} " + " ".join(f"{k.value:>12}" for k in kinds))
for mn in (1, 2, 4, 8, 16):
    base = rc.SystemConfig.from_snr_db(beta=0.5, m=mn, n=mn, snr_db=6.0, tc=TC, tau=0)
    row = []
    for kind in kinds:
        tau_opt, _ = rc.optimize_tau(base, kind)
        row.append(tau_opt / TC)
    print(f"{mn:>4} " + " ".join(f"{v:>12.2f}" for v in row))
