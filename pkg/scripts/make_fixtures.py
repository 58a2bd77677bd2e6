"""Write the JSON inputs under fixtures/ used by the CLI and its tests."""
import json
from pathlib import Path

import numpy as np

from g2calib import chern, torus_examples as tx
from g2calib.boundary_split import perturbed_psi_positive_config, random_coassociative_config, standard_config
from g2calib.calibration import coordinate_plane
from g2calib.surfaces import icosphere

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def dump(name, data):
    (OUT / name).write_text(json.dumps(data, indent=1) + "\n")
    print("wrote", OUT / name)


def main():
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(7)
    sphere = icosphere(2)
    dump("tautological_sphere.json", chern.tautological_bundle(sphere).to_json())
    dump("tangent_sphere.json", chern.tangent_bundle(sphere).to_json())
    dump("nu_x_sphere.json", chern.boundary_normal_bundle(sphere).to_json())
    dump("plane_e1234.json", coordinate_plane(1, 2, 3, 4).to_json())
    dump("plane_e145.json", coordinate_plane(1, 4, 5).to_json())
    dump("boundary_standard.json", standard_config().to_json())
    dump("boundary_psi_positive.json", perturbed_psi_positive_config(random_coassociative_config(rng), rng, 0.2).to_json())
    dump("components_bryant_salamon_3.json", [{"genus": 0, "c1": 3}])
    dump("components_second_joyce.json", [{"genus": 0, "c1": 0}, {"genus": 0, "c1": 0}])
    dump("involutions_flat.json", [dict(m.to_json(), label=m.label) for m in (tx.FLAT_SIGMA, tx.FLAT_TAU)])
    gens = [dict(m.to_json(), label=m.label) for m in tx.GAMMA_GENERATORS]
    dump("census_alpha_tori.json", {"generators": gens, "fixed_loci_of": [gens[0]]})
    dump("census_warmup_tau.json", {"generators": gens, "base": dict(tx.WARMUP_TAU.to_json(), label="tau0")})


if __name__ == "__main__":
    main()
