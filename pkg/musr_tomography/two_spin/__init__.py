from musr_tomography.two_spin.clebsch_gordan import CGMatrix, TwoSpinBasis, cg_matrix, coupled_spins
from musr_tomography.two_spin.two_spin_tomogram import (
    TotalPdfTable,
    TwoSpinTomogram,
    blockdiag_rotation,
    individual_tomogram,
    individual_tomogram_unitary,
    infer_dims,
    product_rotation,
    reconstruct_blockdiag,
    reconstruct_two_spin,
    reduced_tomogram,
    reduced_tomogram_unitary,
    total_from_individual,
    total_pdf,
    total_tomogram,
    weighted_values,
)
