# varmetrics package initialization
from dotenv import load_dotenv

__version__ = "0.1.0"

# Load environment variables from .env file before settings are read
load_dotenv()
