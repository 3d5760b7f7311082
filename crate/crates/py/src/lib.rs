//! Python bindings: images, noise injection, the denoiser and PSNR.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use hgrms::{
    BorderMode, DenoiseParams, EngineMode, EngineSpec, NoiseSpec, PgmEncoding, Psnr, SynthKind,
};

fn to_py(e: hgrms::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// 8-bit grayscale image, row-major.
#[pyclass(name = "GrayImage", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGrayImage {
    inner: hgrms::GrayImage,
}

#[pymethods]
impl PyGrayImage {
    #[new]
    fn new(width: usize, height: usize, pixels: Vec<u8>) -> PyResult<Self> {
        let inner = hgrms::GrayImage::new(width, height, pixels).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn filled(width: usize, height: usize, value: u8) -> PyResult<Self> {
        let inner = hgrms::GrayImage::filled(width, height, value).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_pgm(data: &[u8]) -> PyResult<Self> {
        read_pgm(data)
    }

    #[pyo3(signature = (ascii = false))]
    fn to_pgm<'py>(&self, py: Python<'py>, ascii: bool) -> Bound<'py, PyBytes> {
        write_pgm(py, self, ascii)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    /// Raw row-major intensities.
    #[getter]
    fn pixels<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.pixels())
    }

    fn get(&self, row: usize, col: usize) -> PyResult<u8> {
        if row >= self.inner.height() || col >= self.inner.width() {
            return Err(PyValueError::new_err("pixel index out of range"));
        }
        Ok(self.inner.get(row, col))
    }

    fn __repr__(&self) -> String {
        format!("GrayImage({}x{})", self.inner.width(), self.inner.height())
    }
}

#[pyclass(name = "CardinalityMap", frozen)]
struct PyCardinalityMap {
    inner: hgrms::CardinalityMap,
}

#[pymethods]
impl PyCardinalityMap {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn counts(&self) -> Vec<u32> {
        self.inner.counts().to_vec()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<u32> {
        if row >= self.inner.height() || col >= self.inner.width() {
            return Err(PyValueError::new_err("pixel index out of range"));
        }
        Ok(self.inner.get(row, col))
    }
}

#[pyclass(name = "PassStats", frozen, get_all)]
struct PyPassStats {
    iteration: u32,
    flagged: usize,
    replaced: usize,
    elapsed_ms: f64,
}

#[pymethods]
impl PyPassStats {
    fn __repr__(&self) -> String {
        format!(
            "PassStats(iteration={}, flagged={}, replaced={}, elapsed_ms={:.3})",
            self.iteration, self.flagged, self.replaced, self.elapsed_ms
        )
    }
}

impl From<hgrms::PassStats> for PyPassStats {
    fn from(s: hgrms::PassStats) -> Self {
        Self {
            iteration: s.iteration,
            flagged: s.flagged,
            replaced: s.replaced,
            elapsed_ms: s.elapsed.as_secs_f64() * 1e3,
        }
    }
}

fn params(
    alpha: u32,
    beta: u32,
    k: u32,
    card_threshold: u32,
    border: &str,
) -> PyResult<DenoiseParams> {
    let params = DenoiseParams {
        alpha,
        beta,
        k,
        card_threshold,
        border_mode: border.parse::<BorderMode>().map_err(to_py)?,
    };
    params.validate().map_err(to_py)?;
    Ok(params)
}

fn engine(mode: &str, workers: Option<usize>) -> PyResult<EngineSpec> {
    let mode = mode.parse::<EngineMode>().map_err(to_py)?;
    EngineSpec::new(mode, workers.unwrap_or_else(hgrms::default_workers)).map_err(to_py)
}

#[pyfunction]
fn read_pgm(data: &[u8]) -> PyResult<PyGrayImage> {
    let inner = hgrms::read_pgm(data).map_err(to_py)?;
    Ok(PyGrayImage { inner })
}

#[pyfunction]
#[pyo3(signature = (img, ascii = false))]
fn write_pgm<'py>(py: Python<'py>, img: &PyGrayImage, ascii: bool) -> Bound<'py, PyBytes> {
    let encoding = if ascii {
        PgmEncoding::Ascii
    } else {
        PgmEncoding::Binary
    };
    PyBytes::new(py, &hgrms::write_pgm(&img.inner, encoding))
}

/// `kind` is one of "gradient", "checker", "smooth-random".
#[pyfunction]
#[pyo3(signature = (width, height, seed = 0, kind = "smooth-random"))]
fn synth_image(width: usize, height: usize, seed: u64, kind: &str) -> PyResult<PyGrayImage> {
    let kind = kind.parse::<SynthKind>().map_err(to_py)?;
    let inner = hgrms::synth_image(width, height, seed, kind).map_err(to_py)?;
    Ok(PyGrayImage { inner })
}

/// Returns the noisy image and the row-major corruption mask.
#[pyfunction]
#[pyo3(signature = (img, density, salt_ratio = 0.5, seed = 0))]
fn inject_sp_noise(
    img: &PyGrayImage,
    density: f64,
    salt_ratio: f64,
    seed: u64,
) -> PyResult<(PyGrayImage, Vec<bool>)> {
    let spec = NoiseSpec::new(density, salt_ratio, seed).map_err(to_py)?;
    let (noisy, mask) = hgrms::inject_sp_noise(&img.inner, &spec);
    Ok((PyGrayImage { inner: noisy }, mask.flags().to_vec()))
}

#[pyfunction]
fn similar(a: u8, b: u8, alpha: u32) -> bool {
    hgrms::similar(a, b, alpha)
}

#[pyfunction]
#[pyo3(signature = (img, alpha = 20, beta = 1))]
fn compute_cardinality(img: &PyGrayImage, alpha: u32, beta: u32) -> PyResult<PyCardinalityMap> {
    let inner = hgrms::compute_cardinality(&img.inner, alpha, beta).map_err(to_py)?;
    Ok(PyCardinalityMap { inner })
}

#[pyfunction]
#[pyo3(signature = (img, card, alpha = 20, beta = 1, card_threshold = 3, border = "faithful"))]
fn denoise_pass(
    img: &PyGrayImage,
    card: &PyCardinalityMap,
    alpha: u32,
    beta: u32,
    card_threshold: u32,
    border: &str,
) -> PyResult<(PyGrayImage, PyPassStats)> {
    let params = params(alpha, beta, 1, card_threshold, border)?;
    let (out, stats) = hgrms::denoise_pass(&img.inner, &card.inner, &params).map_err(to_py)?;
    Ok((PyGrayImage { inner: out }, stats.into()))
}

/// Runs the full denoiser; the GIL is released while it works.
#[pyfunction]
#[pyo3(signature = (
    img, alpha = 20, beta = 1, k = 5, card_threshold = 3,
    border = "faithful", engine = "parallel", workers = None
))]
#[allow(clippy::too_many_arguments)]
fn denoise(
    py: Python<'_>,
    img: &PyGrayImage,
    alpha: u32,
    beta: u32,
    k: u32,
    card_threshold: u32,
    border: &str,
    engine: &str,
    workers: Option<usize>,
) -> PyResult<(PyGrayImage, Vec<PyPassStats>)> {
    let params = params(alpha, beta, k, card_threshold, border)?;
    let spec = self::engine(engine, workers)?;
    let input = &img.inner;
    let (out, history) = py
        .detach(|| hgrms::denoise(input, &params, &spec))
        .map_err(to_py)?;
    Ok((
        PyGrayImage { inner: out },
        history.into_iter().map(Into::into).collect(),
    ))
}

#[pyfunction]
fn mse(a: &PyGrayImage, b: &PyGrayImage) -> PyResult<f64> {
    hgrms::mse(&a.inner, &b.inner).map_err(to_py)
}

/// PSNR in dB; `float("inf")` for identical images.
#[pyfunction]
fn psnr(a: &PyGrayImage, b: &PyGrayImage) -> PyResult<f64> {
    hgrms::psnr(&a.inner, &b.inner)
        .map(|p: Psnr| p.as_f64())
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (img, alpha = 20, beta = 1, card_threshold = 3))]
fn residual_noise_count(
    img: &PyGrayImage,
    alpha: u32,
    beta: u32,
    card_threshold: u32,
) -> PyResult<usize> {
    hgrms::residual_noise_count(&img.inner, alpha, beta, card_threshold).map_err(to_py)
}

#[pymodule]
fn pyhgrms(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrayImage>()?;
    m.add_class::<PyCardinalityMap>()?;
    m.add_class::<PyPassStats>()?;
    m.add_function(wrap_pyfunction!(read_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pgm, m)?)?;
    m.add_function(wrap_pyfunction!(synth_image, m)?)?;
    m.add_function(wrap_pyfunction!(inject_sp_noise, m)?)?;
    m.add_function(wrap_pyfunction!(similar, m)?)?;
    m.add_function(wrap_pyfunction!(compute_cardinality, m)?)?;
    m.add_function(wrap_pyfunction!(denoise_pass, m)?)?;
    m.add_function(wrap_pyfunction!(denoise, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(residual_noise_count, m)?)?;
    Ok(())
}
