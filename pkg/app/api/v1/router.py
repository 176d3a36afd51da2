from fastapi import APIRouter

from app.api.v1.endpoints import oscillator, spectra, transforms, verdicts, verification

router = APIRouter()

router.include_router(spectra.router)
router.include_router(oscillator.router)
router.include_router(transforms.router)
router.include_router(verdicts.router)
router.include_router(verification.router)
