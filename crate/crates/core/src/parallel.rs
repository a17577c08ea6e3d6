//! Element-loop execution. With the `parallel` feature the loops run on the
//! rayon pool; without it every mode falls back to a plain sequential loop.
//! Results are always collected in element order, so both modes produce
//! bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// True when this mode actually runs on multiple threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }

    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecMode::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Runs `f(index, chunk)` over consecutive `chunk_len` slices of `data`.
    /// The first error (lowest index) is returned.
    pub fn try_for_each_chunk<E, F>(self, data: &mut [f64], chunk_len: usize, f: F) -> Result<(), E>
    where
        E: Send,
        F: Fn(usize, &mut [f64]) -> Result<(), E> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecMode::Parallel {
            let results: Vec<Result<(), E>> = data
                .par_chunks_mut(chunk_len)
                .enumerate()
                .map(|(i, c)| f(i, c))
                .collect();
            return results.into_iter().collect();
        }
        for (i, c) in data.chunks_mut(chunk_len).enumerate() {
            f(i, c)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = ExecMode::Sequential.map(100, |i| (i as f64).sqrt());
        let b = ExecMode::Parallel.map(100, |i| (i as f64).sqrt());
        assert_eq!(a, b);
    }

    #[test]
    fn chunk_errors_report_lowest_index() {
        let mut data = vec![0.0; 40];
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let r = mode.try_for_each_chunk(&mut data, 4, |i, c| {
                c.fill(i as f64);
                if i >= 5 {
                    Err(i)
                } else {
                    Ok(())
                }
            });
            assert_eq!(r, Err(5));
        }
    }
}
