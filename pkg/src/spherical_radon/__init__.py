"""Spherical mean Radon transform on even functions: forward model, spectra and inversions."""
from .backprojection import (DivergenceTable, backproject, backproject_deriv,
                             deriv_truncation_tail, divergence_probe, radial_derivative)
from .core import (AxisSpec, DataSpectrum, DimensionConfig, FieldGrid, FieldSpectrum, Phantom,
                   PhantomComponent, Sinogram, bump_phantom, eval_phantom, gaussian_phantom,
                   make_dimension_config, sample_field, symmetric_axis)
from .forward import AngularQuadrature, forward_project, gaussian_forward_oracle, spherical_mean
from .io import RunManifest, export_image, read_grid, write_grid
from .reconstruct import (ReconConfig, ReconReport, compare_fields, recon_fourier, recon_mfbp,
                          recon_rstar_k, reconstruct)
from .spectral import (NormScanTable, apply_K, data_spectrum_to_sinogram, fhat_from_ghat,
                       field_to_spectrum, fractional_laplacian, ghat_from_fhat, hilbert_y,
                       norm_window_scan, sinogram_to_data_spectrum, spectrum_to_field)

__version__ = "0.1.0"
