"""Budget-audit every registered network at the official 960x540 input.

Walks the model zoo, prints analytic parameter counts and GMACs next to the
published figures, and shows which models clear the 5M-parameter /
2000-GMAC challenge gate.
"""

from epsr.archs import MODEL_BUILDERS, build_model
from epsr.efficiency import audit
from epsr.scoring import EFFICIENCY

PUBLISHED = {
    "safmn_l": EFFICIENCY["VPEG"],
    "tiny_esrgan": EFFICIENCY["MiAlgo"],
    "efdn": EFFICIENCY["IPIU"],
    "realesrgan_baseline": EFFICIENCY["Real-ESRGAN"],
}


def main():
    print(f"{'model':22s} {'params (M)':>10s} {'published':>10s} "
          f"{'GMACs':>10s} {'published':>10s}  gate")
    for name in MODEL_BUILDERS:
        model = build_model(name, seed=0)
        if name == "efdn":
            model = model.reparameterize()  # deployment form
        report = audit(model)
        pub_params, pub_gmacs = PUBLISHED[name]
        print(f"{name:22s} {report.parameter_count / 1e6:10.4f} {pub_params:10.4f} "
              f"{report.gmacs:10.2f} {pub_gmacs:10.2f}  "
              f"{'PASS' if report.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
