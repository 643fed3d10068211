import sys
from dotenv import load_dotenv
load_dotenv()

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from src.routes import diagnose, health, saturation, score
from src.logging_setup import configure_logging

configure_logging()

app = FastAPI(
    title="HR Lab API",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# API Routes
app.include_router(health.router, prefix="/api", tags=["Health"])
app.include_router(saturation.router, prefix="/api", tags=["Saturation"])
app.include_router(score.router, prefix="/api", tags=["Scoring"])
app.include_router(diagnose.router, prefix="/api", tags=["Diagnostics"])


if __name__ == "__main__":
    from src.cli import main

    sys.exit(main())
