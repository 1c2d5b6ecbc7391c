"""Regenerate the FCIDUMP fixtures and their reference energies.

Requires pyscf. Writes into ../fixtures relative to this file.
"""
import json
import math
import os

import numpy as np
from pyscf import gto, scf, mcscf, fci, ao2mo
from pyscf.mcscf import avas
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def sector_spectrum(h1, h2, norb, nelec, nroots):
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-12
    e, _ = solver.kernel(h1, h2, norb, nelec, nroots=nroots)
    return [float(x) for x in np.atleast_1d(e)]


def h2():
    mol = gto.M(atom="H 0 0 0; H 0 0 0.735", basis="sto-3g", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    path = os.path.join(OUT, "h2_sto3g.fcidump")
    fcidump.from_scf(mf, path, tol=1e-14)
    cis = fci.FCI(mf)
    e = cis.kernel()[0]
    return {"file": "h2_sto3g.fcidump", "norb": 2, "nelec": 2, "e_ground": float(e),
            "e_hf": float(mf.e_tot), "geometry_angstrom": "H-H 0.735", "basis": "sto-3g"}


def active_space(name, atom, ncas, nelecas):
    mol = gto.M(atom=atom, basis="cc-pvdz", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    ncas_a, nelecas_a, mo = avas.avas(mf, ["C 2pz"], canonicalize=True, verbose=0)
    assert ncas_a == ncas and nelecas_a == nelecas, (ncas_a, nelecas_a)
    mc = mcscf.CASSCF(mf, ncas, nelecas)
    mc.conv_tol = 1e-11
    mc.kernel(mo)
    path = os.path.join(OUT, f"{name}.fcidump")
    fcidump.from_mcscf(mc, path, tol=1e-14)
    h1, ecore = mc.get_h1eff()
    h2 = ao2mo.restore(1, mc.get_h2eff(), ncas)
    neleca = nelecas // 2
    nsector = math.comb(ncas, neleca) ** 2
    energies = sector_spectrum(h1, h2, ncas, (neleca, neleca), nsector)
    energies = [x + ecore for x in energies]
    return {"file": f"{name}.fcidump", "norb": ncas, "nelec": nelecas,
            "e_ground": energies[0], "sz0_sector_energies": energies,
            "e_casscf": float(mc.e_tot), "e_hf": float(mf.e_tot), "basis": "cc-pvdz",
            "active_space": "AVAS C 2pz, CASSCF orbitals"}


ETHYLENE = """
C  0.0000  0.6695 0.0
C  0.0000 -0.6695 0.0
H  0.9289  1.2321 0.0
H -0.9289  1.2321 0.0
H  0.9289 -1.2321 0.0
H -0.9289 -1.2321 0.0
"""


def butadiene_geometry():
    cc_d, cc_s, ch = 1.338, 1.454, 1.09
    ang = math.radians(123.6)
    c2 = np.array([-cc_s / 2, 0.0])
    c3 = -c2
    c1 = c2 + cc_d * np.array([-math.cos(math.pi - ang), math.sin(math.pi - ang)])
    c4 = -c1
    atoms = [("C", c1), ("C", c2), ("C", c3), ("C", c4)]

    def h_at(center, angle):
        return center + ch * np.array([math.cos(angle), math.sin(angle)])

    bond12 = math.atan2(*(c2 - c1)[::-1])
    atoms.append(("H", h_at(c1, bond12 + math.radians(121.0))))
    atoms.append(("H", h_at(c1, bond12 - math.radians(121.0))))
    bond23 = math.atan2(*(c3 - c2)[::-1])
    atoms.append(("H", h_at(c2, bond23 + math.radians(117.0) * -1.0)))
    atoms.append(("H", -atoms[-1][1]))
    atoms.append(("H", -atoms[4][1]))
    atoms.append(("H", -atoms[5][1]))
    return "\n".join(f"{s} {p[0]:.6f} {p[1]:.6f} 0.0" for s, p in atoms)


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    meta = {"h2": h2(),
            "ethylene_cas22": active_space("ethylene_cas22", ETHYLENE, 2, 2),
            "butadiene_cas44": active_space("butadiene_cas44", butadiene_geometry(), 4, 4)}
    meta["butadiene_cas44"]["geometry"] = butadiene_geometry()
    with open(os.path.join(OUT, "reference.json"), "w") as f:
        json.dump(meta, f, indent=2)
    print(json.dumps(meta, indent=2))
